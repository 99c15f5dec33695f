"""Synthetic corpora, lexicons and tagsets with known structure.

These generators back the acceptance benchmarks and the smoke tests.  Each
benchmark is built so that the information available to each model variant
is known exactly, which lets the best achievable accuracy be computed by
enumeration before any training happens.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .corpus import Sentence, TaggedCorpus
from .lexicon import LabelInventory, MorphLexicon
from .tagset import TagInventory, build_inventory

# category -> (slot alphabets, number of tags kept)
_TAGSET_LAYOUT = {
    "n": (["kvh", "ef", "noþe", ["", "g"], ["", "m", "ö", "s"]], 130),
    "l": (["kvh", "ef", "noþe", "svo", "fme"], 120),
    "f": (["abeopst", "kvh", "ef", "noþe"], 84),
    "g": (["kvh", "ef", "noþe"], 24),
    "t": (["afop", "kvh", "ef", "noþe"], 50),
    "s": (["nbfvlþ", "gm", "123", "ef", "nþ"], 144),
    "a": ([["", "a", "o", "þ", "e", "m", "u", "f"]], 8),
    "c": ([["", "t", "n"]], 3),
    "e": ([[""]], 1),
    "x": ([[""]], 1),
}


def synthetic_tagset() -> list[str]:
    """565 mnemonic tags over 10 lexical categories (invented feature codes)."""
    tags = []
    for cat, (slots, keep) in _TAGSET_LAYOUT.items():
        combos = sorted(cat + "".join(p) for p in itertools.product(*slots))
        tags.extend(combos[:keep])
    return sorted(tags)


def bundled_tagset_path():
    return resources.files("morphtag") / "data" / "synthetic_tagset.txt"


def _random_forms(rng, n, alphabet="abdefghijklmnoprstuvxyþæöáéíóú", lo=4, hi=7, exclude=()):
    seen = set(exclude)
    out = []
    while len(out) < n:
        form = "".join(rng.choice(list(alphabet), size=rng.integers(lo, hi + 1)))
        if form not in seen:
            seen.add(form)
            out.append(form)
    return out


# ---------------------------------------------------------------------------------------
@dataclass
class Benchmark:
    train: TaggedCorpus
    test: TaggedCorpus
    fine: TagInventory
    labels: LabelInventory
    lexicon: MorphLexicon
    info: dict


def overfit_corpus(seed: int = 0, n_sentences: int = 50, vocab_size: int = 60, n_tags: int = 8) -> TaggedCorpus:
    """Sentences over a fixed vocabulary where each form carries one tag.

    Forms are random strings; each is assigned a tag uniformly at random, so
    the corpus is fully memorisable but the tag is not predictable from form
    shape.
    """
    rng = np.random.default_rng(seed)
    tags = synthetic_tagset()
    tag_choice = [tags[i] for i in rng.choice(len(tags), size=n_tags, replace=False)]
    forms = _random_forms(rng, vocab_size, lo=2, hi=6)
    tag_of = {f: tag_choice[rng.integers(n_tags)] for f in forms}
    sentences = []
    for _ in range(n_sentences):
        length = int(rng.integers(4, 11))
        chosen = [forms[i] for i in rng.integers(0, vocab_size, size=length)]
        sentences.append(Sentence.from_pairs([(f, tag_of[f]) for f in chosen]))
    return TaggedCorpus.from_sentences(sentences, k=5)


# ---------------------------------------------------------------------------------------
_LEX_CLASSES = [  # tag, lexicon labels
    ("nken", ("no", "masc", "sing", "nom")),
    ("nveo", ("no", "fem", "plur", "acc")),
    ("lhenof", ("adj", "neut", "sing", "nom")),
    ("sfg3en", ("verb", "ind", "sing", "3p")),
]
_LEX_FUNCTION = [("og", "c"), ("en", "c"), ("sem", "ct"), ("í", "aþ"), ("á", "ao"),
                 ("til", "ae"), ("ekki", "aa"), ("hinn", "gken"), ("þessi", "fakeo"),
                 ("tveir", "tfkfn"), (".", "x"), ("?", "x")]


def lexicon_benchmark(seed: int = 0, n_train: int = 150, n_test: int = 60,
                      sent_len: int = 10, content_per_sentence: int = 3,
                      forms_per_class: int = 10) -> Benchmark:
    """Ambiguous open-class forms whose tag only the lexicon reveals.

    Every sentence has *content_per_sentence* open-class tokens at random
    positions; the rest are closed-class words with a fixed tag.  Open-class
    forms are random strings drawn independently of their class, and their
    position in the sentence is independent of the class too, so nothing
    but the lexicon entry tells the classes apart.  Test sentences use
    open-class forms that never occur in training.
    """
    rng = np.random.default_rng(seed)
    labels = LabelInventory(sorted({lab for _, labs in _LEX_CLASSES for lab in labs}))
    lexicon = MorphLexicon(labels)
    n_cls = len(_LEX_CLASSES)
    function_forms = [f for f, _ in _LEX_FUNCTION]
    all_forms = _random_forms(rng, 2 * n_cls * forms_per_class, exclude=function_forms)
    train_pool, test_pool = [], []
    for c in range(n_cls):
        block = all_forms[2 * c * forms_per_class:2 * (c + 1) * forms_per_class]
        train_pool.append(block[:forms_per_class])
        test_pool.append(block[forms_per_class:])
        for form in block:
            lexicon.add(form, _LEX_CLASSES[c][1])

    def make(n, pools):
        sentences = []
        for _ in range(n):
            slots = set(rng.choice(sent_len, size=content_per_sentence, replace=False).tolist())
            pairs = []
            for i in range(sent_len):
                if i in slots:
                    c = int(rng.integers(n_cls))
                    form = pools[c][int(rng.integers(len(pools[c])))]
                    pairs.append((form, _LEX_CLASSES[c][0]))
                else:
                    pairs.append(_LEX_FUNCTION[int(rng.integers(len(_LEX_FUNCTION)))])
            sentences.append(Sentence.from_pairs(pairs))
        return TaggedCorpus.from_sentences(sentences, k=5)

    train = make(n_train, train_pool)
    test = make(n_test, test_pool)
    fine = build_inventory([t for t, _ in _LEX_CLASSES] + [t for _, t in _LEX_FUNCTION])
    info = {"n_classes": n_cls, "content_fraction": content_per_sentence / sent_len,
            "class_prior": np.full(n_cls, 1.0 / n_cls),
            "open_class_tags": [t for t, _ in _LEX_CLASSES]}
    return Benchmark(train, test, fine, labels, lexicon, info)


def lexicon_benchmark_bayes(bench: Benchmark) -> dict:
    """Best achievable test accuracy with and without the lexicon, by enumeration.

    For each test token the posterior over tags is enumerated from the
    generator: closed-class forms have one tag; an open-class form unseen in
    training has a likelihood that does not depend on its class (forms are
    drawn class-independently), so without the lexicon the posterior equals
    the class prior, while the lexicon entry identifies the class exactly
    whenever the label sets differ.
    """
    prior = bench.info["class_prior"]
    open_tags = bench.info["open_class_tags"]
    label_sets = {frozenset(labs) for _, labs in _LEX_CLASSES}
    lexicon_separates = len(label_sets) == len(_LEX_CLASSES)
    train_forms = set(bench.train.forms())
    n = hit_base = hit_lex = 0
    for sent in bench.test:
        for tok in sent.tokens:
            n += 1
            if tok.tag not in open_tags:
                hit_base += 1
                hit_lex += 1
                continue
            if tok.form in train_forms:  # does not occur by construction; handled for completeness
                hit_base += 1
                hit_lex += 1
                continue
            # posterior without lexicon: prior * class-independent likelihood
            post = prior * 1.0
            hit_base += float(post.max() / post.sum())
            hit_lex += 1.0 if lexicon_separates else float(post.max() / post.sum())
    return {"baseline": hit_base / n, "with_lexicon": hit_lex / n, "tokens": n}


# ---------------------------------------------------------------------------------------
_STEP_CATS = "nlfsa"
_NOMINAL, _VERBAL = "nlf", "sa"


def stepwise_benchmark(seed: int = 0, n_train: int = 80, n_test: int = 150, units: int = 3,
                       forms_per_pair: int = 4, zipf: float = 1.3, max_gap: int = 2) -> Benchmark:
    """Fine tags = lexical category x 8 feature values (40 tags).

    Each sentence is a run of three-token units ``cue content marker``.
    The cue word (``det`` or ``aux``) says whether the content word is read
    nominally or verbally; the lexicon lists one nominal and one verbal
    category for every content form; the marker word fixes the feature
    digit.  Up to *max_gap* filler words may separate cue and content word.
    Categories are thus easy to get with the lexicon and the cue,
    while feature values follow a skewed distribution so many of the 40
    fine tags are rare in training.
    """
    rng = np.random.default_rng(seed)
    fine_tags = [c + str(d) for c in _STEP_CATS for d in range(8)]
    labels = LabelInventory([f"cat_{c}" for c in _STEP_CATS])
    lexicon = MorphLexicon(labels)
    pairs = [(a, b) for a in _NOMINAL for b in _VERBAL]
    forms = _random_forms(rng, 2 * len(pairs) * forms_per_pair, exclude=("det", "aux"))
    train_pool, test_pool = {}, {}
    for i, pr in enumerate(pairs):
        block = forms[2 * i * forms_per_pair:2 * (i + 1) * forms_per_pair]
        train_pool[pr] = block[:forms_per_pair]
        test_pool[pr] = block[forms_per_pair:]
        for f in block:
            lexicon.add(f, [f"cat_{pr[0]}", f"cat_{pr[1]}"])
    markers = [f"m{d}" for d in range(8)]
    fillers = [("ok", "a0"), ("nú", "a0"), ("þá", "a0")]
    weights = 1.0 / np.arange(1, 9) ** zipf
    weights /= weights.sum()
    # the most frequent feature differs per category so categories cannot share a default
    feature_perm = {c: rng.permutation(8) for c in _STEP_CATS}

    def make(n, pool):
        sentences = []
        for _ in range(n):
            toks = []
            for _ in range(units):
                pr = pairs[int(rng.integers(len(pairs)))]
                verbal = bool(rng.integers(2))
                cat = pr[1] if verbal else pr[0]
                digit = int(feature_perm[cat][rng.choice(8, p=weights)])
                form = pool[pr][int(rng.integers(len(pool[pr])))]
                toks.append(("aux" if verbal else "det", "a0" if verbal else "f0"))
                for _ in range(int(rng.integers(max_gap + 1))):
                    toks.append(fillers[int(rng.integers(len(fillers)))])
                toks.append((form, f"{cat}{digit}"))
                toks.append((markers[digit], f"a{digit}"))
            sentences.append(Sentence.from_pairs(toks))
        return TaggedCorpus.from_sentences(sentences, k=5)

    train = make(n_train, train_pool)
    test = make(n_test, test_pool)
    info = {"categories": _STEP_CATS, "n_fine": len(fine_tags)}
    return Benchmark(train, test, build_inventory(fine_tags), labels, lexicon, info)


def write_benchmark(bench: Benchmark, directory) -> dict:
    """Write a benchmark as corpus/lexicon/labels/tagset files; returns the paths."""
    from pathlib import Path
    from .corpus import write_corpus
    from .tagset import write_tagset
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {"train": d / "train.tsv", "test": d / "test.tsv", "labels": d / "labels.txt",
             "lexicon": d / "lexicon.tsv", "tagset": d / "tags.txt"}
    write_corpus(bench.train.sentences, paths["train"])
    write_corpus(bench.test.sentences, paths["test"])
    paths["labels"].write_text("".join(lab + "\n" for lab in bench.labels), encoding="utf-8")
    with open(paths["lexicon"], "w", encoding="utf-8") as fh:
        for form in sorted(bench.lexicon.entries):
            labs = ";".join(bench.labels.labels[i] for i in sorted(bench.lexicon.entries[form]))
            fh.write(f"{form}\t{labs}\n")
    write_tagset(bench.fine, paths["tagset"])
    return paths
