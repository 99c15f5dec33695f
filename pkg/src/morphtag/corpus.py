"""Token/tag corpora, k-fold splits, vocabularies and training-set augmentation.

Corpus files hold one ``form<TAB>tag`` pair per line with a blank line
between sentences.  Fold files hold one integer per sentence.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import BadFoldId, EmptyCorpus, InventoryMismatch, MalformedLine, UnknownTag
from .tagset import MnemonicTag, TagInventory, parse_tag

# fold id of sentences that are only ever used for training (augmentation data)
NEVER_TEST = -1


@dataclass(frozen=True, slots=True)
class Token:
    form: str
    gold_tag: MnemonicTag

    @property
    def tag(self) -> str:
        return self.gold_tag.raw


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    line: int = 0  # 1-based line of the first token in the source file, 0 if synthetic

    def __post_init__(self):
        if not self.tokens:
            raise EmptyCorpus("empty sentence")

    def __len__(self):
        return len(self.tokens)

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def tags(self) -> list[str]:
        return [t.gold_tag.raw for t in self.tokens]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], line: int = 0) -> "Sentence":
        return cls(tuple(Token(f, parse_tag(t)) for f, t in pairs), line)


@dataclass(frozen=True)
class TaggedCorpus:
    sentences: tuple[Sentence, ...]
    fold_of: tuple[int, ...]
    k: int = 10

    def __post_init__(self):
        if len(self.fold_of) != len(self.sentences):
            raise BadFoldId(
                f"{len(self.fold_of)} fold ids for {len(self.sentences)} sentences")
        for f in self.fold_of:
            if f != NEVER_TEST and not 0 <= f < self.k:
                raise BadFoldId(f"fold id {f} outside [0, {self.k})")

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def tag_set(self) -> set[str]:
        return {t.tag for s in self.sentences for t in s.tokens}

    def forms(self) -> Iterable[str]:
        for s in self.sentences:
            yield from s.forms

    @classmethod
    def from_sentences(cls, sentences: Sequence[Sentence], k: int = 10,
                       fold_of: Sequence[int] | None = None) -> "TaggedCorpus":
        sentences = tuple(sentences)
        if fold_of is None:
            fold_of = round_robin(len(sentences), k)
        return cls(sentences, tuple(int(f) for f in fold_of), k)


def round_robin(n: int, k: int) -> tuple[int, ...]:
    return tuple(i % k for i in range(n))


def read_sentences(path: str | Path, inventory: TagInventory | None = None,
                   allow_empty: bool = False) -> list[Sentence]:
    """Parse a corpus file into sentences.

    Every non-blank line must contain exactly one TAB.  When *inventory* is
    given, tags outside it raise UnknownTag.
    """
    sentences: list[Sentence] = []
    pairs: list[tuple[str, str]] = []
    start = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                if pairs:
                    sentences.append(Sentence.from_pairs(pairs, start))
                    pairs = []
                continue
            if line.count("\t") != 1:
                raise MalformedLine(f"{path}:{lineno}: expected 'form<TAB>tag', got {line!r}")
            form, tag = line.split("\t")
            tag = tag.strip()
            if not form or not tag:
                raise MalformedLine(f"{path}:{lineno}: empty form or tag in {line!r}")
            if inventory is not None and tag not in inventory:
                raise UnknownTag(f"{path}:{lineno}: tag {tag!r} not in tagset")
            if not pairs:
                start = lineno
            pairs.append((form, tag))
    if pairs:
        sentences.append(Sentence.from_pairs(pairs, start))
    if not sentences and not allow_empty:
        raise EmptyCorpus(f"{path}: no sentences")
    return sentences


def read_folds(path: str | Path) -> list[int]:
    folds = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            folds.append(int(line))
        except ValueError:
            raise BadFoldId(f"{path}:{lineno}: not an integer: {line!r}") from None
    return folds


def load_corpus(path: str | Path, folds: str | Path | Sequence[int] | None = None,
                k: int | None = None, inventory: TagInventory | None = None) -> TaggedCorpus:
    """Load a corpus and assign folds.

    *folds* may be a fold file, an explicit sequence, or None for round-robin
    assignment over *k* folds (default 10).  With explicit folds, *k* defaults
    to the largest fold id plus one.
    """
    sentences = read_sentences(path, inventory)
    if folds is None:
        return TaggedCorpus.from_sentences(sentences, k or 10)
    if isinstance(folds, (str, Path)):
        folds = read_folds(folds)
    folds = list(folds)
    if len(folds) != len(sentences):
        raise BadFoldId(f"fold assignment has {len(folds)} entries for {len(sentences)} sentences")
    if k is None:
        k = max(folds) + 1
    return TaggedCorpus(tuple(sentences), tuple(folds), k)


def write_corpus(sentences: Iterable[Sentence | Sequence[tuple[str, str]]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        first = True
        for s in sentences:
            pairs = [(t.form, t.tag) for t in s.tokens] if isinstance(s, Sentence) else s
            if not first:
                fh.write("\n")
            first = False
            for form, tag in pairs:
                fh.write(f"{form}\t{tag}\n")


def folds_split(corpus: TaggedCorpus, test_fold: int) -> tuple[TaggedCorpus, TaggedCorpus]:
    if not 0 <= test_fold < corpus.k:
        raise BadFoldId(f"test fold {test_fold} outside [0, {corpus.k})")
    train = [(s, f) for s, f in zip(corpus.sentences, corpus.fold_of) if f != test_fold]
    test = [(s, f) for s, f in zip(corpus.sentences, corpus.fold_of) if f == test_fold]

    def make(items):
        return TaggedCorpus(tuple(s for s, _ in items), tuple(f for _, f in items), corpus.k)

    return make(train), make(test)


def augment_training(base: TaggedCorpus, extra: TaggedCorpus,
                     inventory: TagInventory | None = None) -> TaggedCorpus:
    """Append *extra* to *base*; the added sentences are never used as test data."""
    allowed = set(inventory) if inventory is not None else base.tag_set()
    outside = sorted(extra.tag_set() - allowed)
    if outside:
        raise InventoryMismatch(f"extra corpus uses tags outside the base inventory: {outside[:10]}")
    return TaggedCorpus(base.sentences + extra.sentences,
                        base.fold_of + (NEVER_TEST,) * len(extra), base.k)


UNK_WORD = 0
UNK_CHAR = 0
WORD_START = 1
WORD_END = 2
N_RESERVED_WORDS = 1
N_RESERVED_CHARS = 3


@dataclass(frozen=True)
class Vocabulary:
    """Word and character indices.

    Reserved ids come first and live outside the observed-item dicts, so an
    observed form can never collide with them.
    """
    word_index: dict[str, int]
    char_index: dict[str, int]
    unk_word: int = UNK_WORD
    unk_char: int = UNK_CHAR
    word_start: int = WORD_START
    word_end: int = WORD_END

    @classmethod
    def from_items(cls, words: Iterable[str], chars: Iterable[str]) -> "Vocabulary":
        return cls({w: i + N_RESERVED_WORDS for i, w in enumerate(words)},
                   {c: i + N_RESERVED_CHARS for i, c in enumerate(chars)})

    @property
    def n_words(self) -> int:
        return len(self.word_index) + N_RESERVED_WORDS

    @property
    def n_chars(self) -> int:
        return len(self.char_index) + N_RESERVED_CHARS

    def word_id(self, form: str) -> int:
        return self.word_index.get(form, UNK_WORD)

    def char_ids(self, form: str) -> list[int]:
        get = self.char_index.get
        return [WORD_START] + [get(c, UNK_CHAR) for c in form] + [WORD_END]

    def __contains__(self, form):
        return form in self.word_index

    def words(self) -> list[str]:
        return sorted(self.word_index, key=self.word_index.__getitem__)

    def chars(self) -> list[str]:
        return sorted(self.char_index, key=self.char_index.__getitem__)


def build_vocabulary(train: TaggedCorpus | Iterable[Sentence]) -> Vocabulary:
    forms = {f for s in train for f in s.forms}
    chars = {c for f in forms for c in f}
    return Vocabulary.from_items(sorted(forms), sorted(chars))
