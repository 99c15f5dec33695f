"""BiLSTM taggers: baseline, lexicon-augmented, and stepwise coarse-to-fine.

Each token is encoded as

    [word embedding | char-BiLSTM summary | n-hot lexicon | one-hot category]

where the last two blocks depend on the mode.  A sentence-level BiLSTM reads
the token vectors, a tanh hidden layer follows, and an affine output layer
scores the tags.  In stepwise mode a separately trained lexical-category
tagger runs first and its predictions fill the one-hot category block.
"""
from __future__ import annotations

import dataclasses
import enum
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import Sentence, TaggedCorpus, Vocabulary, build_vocabulary
from .errors import (
    EmptySentence,
    InventoryMismatch,
    MissingCoarseHint,
    ModelFormatError,
    NonFiniteLoss,
    UnexpectedCoarseHint,
)
from .lexicon import LabelInventory, MorphLexicon
from .neural import serialize
from .neural.layers import (
    BiEncoderParams,
    LstmCellParams,
    affine_backward,
    affine_forward,
    bi_encode_backward,
    bi_encode_forward,
    bi_final_backward,
    bi_final_forward,
    glorot,
    softmax_xent,
    softmax_xent_grad,
)
from .neural.optim import Gradients, OptimizerState, sgd_step
from .tagset import MnemonicTag, TagInventory, build_coarse_inventory

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    BASELINE = "baseline"
    WITH_LEXICON = "dmii"
    WITH_LEXICON_AND_COARSE = "lc"

    @property
    def uses_lexicon(self) -> bool:
        return self is not Mode.BASELINE

    @property
    def uses_coarse(self) -> bool:
        return self is Mode.WITH_LEXICON_AND_COARSE


@dataclass(frozen=True)
class ModelConfig:
    word_dim: int = 128
    char_dim: int = 20
    char_hidden: int = 20
    sentence_hidden: int = 64
    ff_hidden: int = 32
    lexicon_dim: int = 61
    coarse_dim: int = 10
    epochs: int = 30
    base_rate: float = 0.13
    decay: float = 0.05
    mode: Mode = Mode.BASELINE
    seed: int = 0
    # "predicted": fine model trains on the coarse model's outputs; "gold": on gold categories
    coarse_hints: str = "predicted"
    learned_coarse_embedding: bool = False
    dtype: str = "float64"
    clip: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("word_dim", "char_dim", "char_hidden", "sentence_hidden", "ff_hidden",
                     "lexicon_dim", "coarse_dim"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.coarse_hints not in ("predicted", "gold"):
            raise ValueError(f"coarse_hints must be 'predicted' or 'gold', got {self.coarse_hints!r}")
        if self.dtype not in ("float64", "float32"):
            raise ValueError(f"dtype must be float64 or float32, got {self.dtype!r}")
        OptimizerState(self.base_rate, self.decay)  # validates the rate/decay pair

    def replace(self, **changes) -> "ModelConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["mode"] = self.mode.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})

    @property
    def input_width(self) -> int:
        width = self.word_dim + 2 * self.char_hidden
        if self.mode.uses_lexicon:
            width += self.lexicon_dim
        if self.mode.uses_coarse:
            width += self.coarse_dim
        return width


@dataclass
class SentenceFeatures:
    word_ids: np.ndarray
    char_ids: list[np.ndarray]
    lexicon: np.ndarray | None

    def __len__(self):
        return len(self.word_ids)


@dataclass
class EpochRecord:
    epoch: int
    rate: float
    mean_loss: float
    train_acc: float

    def line(self) -> str:
        return f"{self.epoch}\t{self.rate:.10g}\t{self.mean_loss:.6f}\t{self.train_acc:.6f}"


SPARSE_PARAMS = ("word_emb", "char_emb", "coarse_emb")


def _lstm(d: dict, prefix: str) -> LstmCellParams:
    return LstmCellParams(d[prefix + ".W"], d[prefix + ".U"], d[prefix + ".b"])


def _bi(d: dict, prefix: str) -> BiEncoderParams:
    return BiEncoderParams(_lstm(d, prefix + "_fwd"), _lstm(d, prefix + "_bwd"))


class TaggerModel:
    """Parameters plus everything needed to map word forms to tag scores.

    *output* is the list of tags the output layer scores: the fine inventory
    for a tagging model, the coarse inventory for a first-pass category model.
    """

    def __init__(self, config: ModelConfig, vocab: Vocabulary, fine: TagInventory,
                 params: dict[str, np.ndarray], labels: LabelInventory | None = None,
                 lexicon: MorphLexicon | None = None, coarse_model: "TaggerModel | None" = None,
                 coarse_pass: bool = False):
        self.config = config
        self.vocab = vocab
        self.fine = fine
        self.coarse = build_coarse_inventory(fine)
        self.coarse_pass = coarse_pass
        self.output = self.coarse if coarse_pass else fine
        self.params = params
        self.labels = labels
        self.coarse_model = coarse_model
        self.lexicon = None
        if lexicon is not None:
            self.attach_lexicon(lexicon)
        if config.mode.uses_coarse and coarse_model is None:
            raise ValueError("stepwise mode needs a trained coarse model")
        if config.mode.uses_lexicon and labels is None:
            raise ValueError(f"mode {config.mode.value!r} needs a label inventory")

    @property
    def dtype(self):
        return np.dtype(self.config.dtype)

    def attach_lexicon(self, lexicon: MorphLexicon) -> None:
        if self.labels is not None and lexicon.labels != self.labels:
            raise InventoryMismatch("lexicon label inventory differs from the model's")
        self.lexicon = lexicon
        if self.coarse_model is not None:
            self.coarse_model.attach_lexicon(lexicon)

    # ---- features -------------------------------------------------------------------
    def features(self, forms: Sequence[str]) -> SentenceFeatures:
        word_ids = np.array([self.vocab.word_id(f) for f in forms], dtype=np.int64)
        char_ids = [np.array(self.vocab.char_ids(f), dtype=np.int64) for f in forms]
        lex = None
        if self.config.mode.uses_lexicon:
            if self.lexicon is None:
                raise ValueError(f"mode {self.config.mode.value!r} needs a lexicon; none attached")
            lex = np.zeros((len(forms), len(self.labels)), dtype=self.dtype)
            for t, form in enumerate(forms):
                found = self.lexicon.lookup(form)
                if found:
                    lex[t, sorted(found)] = 1
        return SentenceFeatures(word_ids, char_ids, lex)

    # ---- forward / backward -----------------------------------------------------------
    def forward(self, feats: SentenceFeatures, coarse_ids=None):
        """Tag scores (T, |output|) for one sentence plus a cache for backward()."""
        cfg = self.config
        p = self.params
        T = len(feats)
        if T == 0:
            raise EmptySentence("cannot tag an empty sentence")
        if cfg.mode.uses_coarse and coarse_ids is None:
            raise MissingCoarseHint("stepwise model needs coarse hints")
        if not cfg.mode.uses_coarse and coarse_ids is not None:
            raise UnexpectedCoarseHint(f"mode {cfg.mode.value!r} takes no coarse hints")

        char_bi = _bi(p, "char")
        summaries = np.empty((T, 2 * cfg.char_hidden), dtype=self.dtype)
        char_caches = []
        for t, cids in enumerate(feats.char_ids):
            summaries[t], cache = bi_final_forward(char_bi, p["char_emb"][cids])
            char_caches.append(cache)
        parts = [p["word_emb"][feats.word_ids], summaries]
        if cfg.mode.uses_lexicon:
            parts.append(feats.lexicon)
        if cfg.mode.uses_coarse:
            coarse_ids = np.asarray(coarse_ids, dtype=np.int64)
            if cfg.learned_coarse_embedding:
                parts.append(p["coarse_emb"][coarse_ids])
            else:
                onehot = np.zeros((T, len(self.coarse)), dtype=self.dtype)
                onehot[np.arange(T), coarse_ids] = 1
                parts.append(onehot)
        X = np.concatenate(parts, axis=1)
        Hs, sent_cache = bi_encode_forward(_bi(p, "sent"), X)
        Z = np.tanh(affine_forward(p["hidden.W"], p["hidden.b"], Hs))
        logits = affine_forward(p["output.W"], p["output.b"], Z)
        return logits, (feats, coarse_ids, char_caches, Hs, sent_cache, Z)

    def backward(self, cache, dlogits: np.ndarray) -> Gradients:
        cfg = self.config
        p = self.params
        feats, coarse_ids, char_caches, Hs, sent_cache, Z = cache
        g = Gradients(p, SPARSE_PARAMS)
        dZ = affine_backward(p["output.W"], Z, dlogits, g["output.W"], g["output.b"])
        dA = dZ * (1.0 - Z * Z)
        dHs = affine_backward(p["hidden.W"], Hs, dA, g["hidden.W"], g["hidden.b"])
        dX = bi_encode_backward(_bi(p, "sent"), sent_cache, dHs, _bi(g.dense, "sent"))
        wd, ch = cfg.word_dim, 2 * cfg.char_hidden
        g.add_rows("word_emb", feats.word_ids, dX[:, :wd])
        char_bi, char_g = _bi(p, "char"), _bi(g.dense, "char")
        dS = dX[:, wd:wd + ch]
        for t, cids in enumerate(feats.char_ids):
            dXc = bi_final_backward(char_bi, char_caches[t], dS[t], char_g)
            g.add_rows("char_emb", cids, dXc)
        if cfg.mode.uses_coarse and cfg.learned_coarse_embedding:
            off = wd + ch + (len(self.labels) if cfg.mode.uses_lexicon else 0)
            g.add_rows("coarse_emb", coarse_ids, dX[:, off:off + cfg.coarse_dim])
        return g

    def loss_and_grads(self, feats: SentenceFeatures, gold_ids, coarse_ids=None):
        logits, cache = self.forward(feats, coarse_ids)
        loss, probs = softmax_xent(logits, gold_ids)
        grads = self.backward(cache, softmax_xent_grad(probs, gold_ids))
        return loss, logits, grads

    # ---- inference -------------------------------------------------------------------
    def coarse_hints(self, forms: Sequence[str]) -> np.ndarray:
        """Category indices predicted by the embedded first-pass model."""
        return self.coarse_model.predict_ids(forms)

    def predict_ids(self, forms: Sequence[str], coarse_ids=None) -> np.ndarray:
        if not forms:
            raise EmptySentence("cannot tag an empty sentence")
        if self.config.mode.uses_coarse and coarse_ids is None:
            coarse_ids = self.coarse_hints(forms)
        logits, _ = self.forward(self.features(forms), coarse_ids)
        return np.argmax(logits, axis=1)  # first maximum wins ties

    def gold_ids(self, sentence: Sentence) -> np.ndarray:
        index = self.output.index_of
        key = (lambda t: t.gold_tag.category) if self.coarse_pass else (lambda t: t.gold_tag.raw)
        try:
            return np.array([index[key(t)] for t in sentence.tokens], dtype=np.int64)
        except KeyError as exc:
            raise InventoryMismatch(f"gold tag {exc.args[0]!r} is not in the model inventory") from None

    def summary(self) -> dict:
        cfg = self.config
        info = {
            "mode": cfg.mode.value,
            "coarse_pass": self.coarse_pass,
            "input_width": cfg.input_width,
            "word_dim": cfg.word_dim,
            "char_dim": cfg.char_dim,
            "char_hidden": cfg.char_hidden,
            "sentence_hidden": cfg.sentence_hidden,
            "ff_hidden": cfg.ff_hidden,
            "fine_tags": len(self.fine),
            "coarse_tags": len(self.coarse),
            "output_size": len(self.output),
            "labels": len(self.labels) if self.labels is not None else 0,
            "vocab_words": self.vocab.n_words,
            "vocab_chars": self.vocab.n_chars,
            "parameters": int(sum(a.size for a in self.params.values())),
        }
        if self.coarse_model is not None:
            info["coarse_model"] = self.coarse_model.summary()
        return info


def init_params(config: ModelConfig, vocab: Vocabulary, n_out: int, n_coarse: int) -> dict:
    """Fresh parameters drawn from a generator seeded with config.seed."""
    rng = np.random.default_rng(config.seed)
    dt = np.dtype(config.dtype)

    def emb(rows, dim):
        r = np.sqrt(3.0 / dim)
        return rng.uniform(-r, r, size=(rows, dim)).astype(dt)

    p = {
        "word_emb": emb(vocab.n_words, config.word_dim),
        "char_emb": emb(vocab.n_chars, config.char_dim),
    }
    for prefix, d_in, h in (("char", config.char_dim, config.char_hidden),
                            ("sent", config.input_width, config.sentence_hidden)):
        bi = BiEncoderParams.init(rng, d_in, h, dt)
        for direction, cell in (("fwd", bi.forward), ("bwd", bi.backward)):
            p[f"{prefix}_{direction}.W"] = cell.W
            p[f"{prefix}_{direction}.U"] = cell.U
            p[f"{prefix}_{direction}.b"] = cell.b
    p["hidden.W"] = glorot(rng, (config.ff_hidden, 2 * config.sentence_hidden), dt)
    p["hidden.b"] = np.zeros(config.ff_hidden, dtype=dt)
    p["output.W"] = glorot(rng, (n_out, config.ff_hidden), dt)
    p["output.b"] = np.zeros(n_out, dtype=dt)
    if config.mode.uses_coarse and config.learned_coarse_embedding:
        p["coarse_emb"] = emb(n_coarse, config.coarse_dim)
    return p


def build_model(config: ModelConfig, vocab: Vocabulary, fine: TagInventory,
                labels: LabelInventory | None = None, lexicon: MorphLexicon | None = None,
                coarse_model: TaggerModel | None = None, coarse_pass: bool = False) -> TaggerModel:
    """Initialise a model; lexicon/coarse widths are taken from the inventories."""
    if labels is None and lexicon is not None:
        labels = lexicon.labels
    coarse = build_coarse_inventory(fine)
    changes = {}
    if config.mode.uses_lexicon:
        if labels is None:
            raise ValueError(f"mode {config.mode.value!r} needs a label inventory or lexicon")
        changes["lexicon_dim"] = len(labels)
    if config.mode.uses_coarse and not config.learned_coarse_embedding:
        changes["coarse_dim"] = len(coarse)
    if changes:
        config = config.replace(**changes)
    n_out = len(coarse) if coarse_pass else len(fine)
    params = init_params(config, vocab, n_out, len(coarse))
    return TaggerModel(config, vocab, fine, params, labels if config.mode.uses_lexicon else None,
                       lexicon if config.mode.uses_lexicon else None, coarse_model, coarse_pass)


def encode_token(model: TaggerModel, form: str, coarse_hint=None) -> np.ndarray:
    """Input vector the sentence encoder sees for one token."""
    cfg = model.config
    if cfg.mode.uses_coarse and coarse_hint is None:
        raise MissingCoarseHint("stepwise model needs a coarse hint per token")
    if not cfg.mode.uses_coarse and coarse_hint is not None:
        raise UnexpectedCoarseHint(f"mode {cfg.mode.value!r} takes no coarse hint")
    p = model.params
    feats = model.features([form])
    summary, _ = bi_final_forward(_bi(p, "char"), p["char_emb"][feats.char_ids[0]])
    parts = [p["word_emb"][feats.word_ids[0]], summary]
    if cfg.mode.uses_lexicon:
        parts.append(feats.lexicon[0])
    if cfg.mode.uses_coarse:
        idx = model.coarse.index_of[coarse_hint] if isinstance(coarse_hint, str) else int(coarse_hint)
        if cfg.learned_coarse_embedding:
            parts.append(p["coarse_emb"][idx])
        else:
            onehot = np.zeros(len(model.coarse), dtype=model.dtype)
            onehot[idx] = 1
            parts.append(onehot)
    return np.concatenate(parts)


def tag_sentence(model: TaggerModel, forms: Sequence[str], return_hints: bool = False):
    """Per-token argmax tags; with *return_hints* also the category hints consumed."""
    forms = list(forms)
    if not forms:
        raise EmptySentence("cannot tag an empty sentence")
    hints = model.coarse_hints(forms) if model.config.mode.uses_coarse else None
    ids = model.predict_ids(forms, hints)
    tags = [MnemonicTag(model.output[i]) for i in ids]
    if return_hints:
        return tags, (None if hints is None else [model.coarse[i] for i in hints])
    return tags


def tag_corpus(model: TaggerModel, sentences) -> list[list[str]]:
    out = []
    for s in sentences:
        forms = s.forms if isinstance(s, Sentence) else list(s)
        out.append([t.raw for t in tag_sentence(model, forms)])
    return out


# ---- training ---------------------------------------------------------------------------
def _hint_ids(model: TaggerModel, sentence: Sentence, feats) -> np.ndarray | None:
    if not model.config.mode.uses_coarse:
        return None
    if model.config.coarse_hints == "gold":
        return np.array([model.coarse.index_of[t.gold_tag.category] for t in sentence.tokens])
    return model.coarse_hints(sentence.forms)


def train(model: TaggerModel, corpus: TaggedCorpus | Sequence[Sentence], epochs: int | None = None,
          on_epoch: Callable[[EpochRecord], None] | None = None) -> tuple[TaggerModel, list[EpochRecord]]:
    """Per-sentence SGD for ``epochs`` epochs (config.epochs by default).

    Sentence order is reshuffled each epoch from the config seed; the rate
    decays geometrically at every epoch boundary.  The model is updated in
    place and returned along with the per-epoch trace.
    """
    cfg = model.config
    sentences = list(corpus.sentences if isinstance(corpus, TaggedCorpus) else corpus)
    epochs = cfg.epochs if epochs is None else epochs
    data = []
    for s in sentences:
        gold = model.gold_ids(s)
        feats = model.features(s.forms)
        data.append((feats, gold, _hint_ids(model, s, feats)))
    opt = OptimizerState(cfg.base_rate, cfg.decay, clip=cfg.clip)
    rng = np.random.default_rng([cfg.seed, 1])
    trace = []
    for epoch in range(epochs):
        total_loss = 0.0
        correct = tokens = 0
        for si in rng.permutation(len(data)):
            feats, gold, hints = data[si]
            loss, logits, grads = model.loss_and_grads(feats, gold, hints)
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"non-finite loss at epoch {epoch}, sentence {si}")
            sgd_step(model.params, grads, opt)
            total_loss += loss
            correct += int(np.sum(np.argmax(logits, axis=1) == gold))
            tokens += len(gold)
        rec = EpochRecord(epoch, opt.rate, total_loss / max(tokens, 1), correct / max(tokens, 1))
        trace.append(rec)
        log.info("epoch %d rate %.5f loss %.4f acc %.4f", rec.epoch, rec.rate, rec.mean_loss, rec.train_acc)
        if on_epoch is not None:
            on_epoch(rec)
        opt.next_epoch()
    return model, trace


def train_stepwise(config: ModelConfig, corpus: TaggedCorpus, lexicon: MorphLexicon,
                   fine: TagInventory | None = None, vocab: Vocabulary | None = None,
                   on_epoch=None) -> tuple[TaggerModel, dict[str, list[EpochRecord]]]:
    """Train the category tagger, then the fine tagger that consumes its output."""
    if lexicon is None:
        raise ValueError("stepwise training needs a morphological lexicon")
    from .tagset import build_inventory
    fine = fine or build_inventory(corpus.tag_set())
    vocab = vocab or build_vocabulary(corpus)
    coarse_cfg = config.replace(mode=Mode.WITH_LEXICON)
    coarse_model = build_model(coarse_cfg, vocab, fine, lexicon=lexicon, coarse_pass=True)
    _, coarse_trace = train(coarse_model, corpus,
                            on_epoch=(lambda r: on_epoch("coarse", r)) if on_epoch else None)
    fine_cfg = config.replace(mode=Mode.WITH_LEXICON_AND_COARSE)
    model = build_model(fine_cfg, vocab, fine, lexicon=lexicon, coarse_model=coarse_model)
    _, fine_trace = train(model, corpus, on_epoch=(lambda r: on_epoch("fine", r)) if on_epoch else None)
    return model, {"coarse": coarse_trace, "fine": fine_trace}


def fit(config: ModelConfig, corpus: TaggedCorpus, fine: TagInventory | None = None,
        lexicon: MorphLexicon | None = None, on_epoch=None):
    """Build and train a model of config.mode on *corpus*; returns (model, traces)."""
    from .tagset import build_inventory
    fine = fine or build_inventory(corpus.tag_set())
    vocab = build_vocabulary(corpus)
    if config.mode.uses_coarse:
        return train_stepwise(config, corpus, lexicon, fine, vocab, on_epoch)
    model = build_model(config, vocab, fine, lexicon=lexicon)
    _, trace = train(model, corpus, on_epoch=(lambda r: on_epoch("fine", r)) if on_epoch else None)
    return model, {"fine": trace}


def write_trace(trace: Sequence[EpochRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in trace:
            fh.write(rec.line() + "\n")


# ---- model files ------------------------------------------------------------------------
def _model_meta(model: TaggerModel) -> tuple[dict, dict]:
    meta = {
        "config": model.config.to_dict(),
        "coarse_pass": model.coarse_pass,
        "fine_tags": list(model.fine),
        "labels": list(model.labels) if model.labels is not None else None,
        "vocab": {"words": model.vocab.words(), "chars": model.vocab.chars()},
        "coarse_model": None,
    }
    tensors = dict(model.params)
    if model.coarse_model is not None:
        sub_meta, sub_tensors = _model_meta(model.coarse_model)
        meta["coarse_model"] = sub_meta
        tensors.update({"coarse/" + k: v for k, v in sub_tensors.items()})
    return meta, tensors


def save_model(model: TaggerModel, path: str | Path) -> None:
    meta, tensors = _model_meta(model)
    serialize.save(path, {"kind": "morphtag-tagger", "model": meta}, tensors)


def _model_from_meta(meta: dict, tensors: dict, lexicon) -> TaggerModel:
    coarse_model = None
    if meta["coarse_model"] is not None:
        sub = {k[len("coarse/"):]: v for k, v in tensors.items() if k.startswith("coarse/")}
        coarse_model = _model_from_meta(meta["coarse_model"], sub, lexicon)
    params = {k: v for k, v in tensors.items() if not k.startswith("coarse/")}
    labels = LabelInventory(meta["labels"]) if meta["labels"] is not None else None
    vocab = Vocabulary.from_items(meta["vocab"]["words"], meta["vocab"]["chars"])
    config = ModelConfig.from_dict(meta["config"])
    return TaggerModel(config, vocab, TagInventory(meta["fine_tags"]), params, labels,
                       lexicon if config.mode.uses_lexicon else None, coarse_model,
                       meta["coarse_pass"])


def load_model(path: str | Path, lexicon: MorphLexicon | None = None) -> TaggerModel:
    header, tensors = serialize.load(path)
    if header.get("kind") != "morphtag-tagger":
        raise ModelFormatError(f"{path}: not a tagger model")
    try:
        return _model_from_meta(header["model"], tensors, lexicon)
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"{path}: incomplete model file ({exc})") from None
