"""Morphological lexicon lookup and n-hot feature encoding.

Lexicon file: ``form<TAB>label;label;...`` per line; repeated forms are
merged by set union.  Labels file: one label per line, line order defines
the vector position of each label.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import TaggedCorpus, Vocabulary
from .errors import MalformedLexiconLine, UnknownLabel


class LabelInventory:
    def __init__(self, labels: Sequence[str]):
        self.labels = tuple(labels)
        self.index_of = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index_of) != len(self.labels):
            raise ValueError("duplicate labels in label inventory")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self.index_of

    def __eq__(self, other):
        return isinstance(other, LabelInventory) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"LabelInventory({len(self)} labels)"


def load_labels(path: str | Path) -> LabelInventory:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return LabelInventory([ln.strip() for ln in lines if ln.strip()])


@dataclass
class MorphLexicon:
    labels: LabelInventory
    entries: dict[str, frozenset[int]] = field(default_factory=dict)
    lowercase_fallback: bool = True

    def __len__(self):
        return len(self.entries)

    def lookup(self, form: str) -> frozenset[int] | None:
        found = self.entries.get(form)
        if found is None and self.lowercase_fallback:
            found = self.entries.get(form.lower())
        return found

    def __contains__(self, form):
        return self.lookup(form) is not None

    def add(self, form: str, labels: Iterable[str]) -> None:
        idx = set()
        for lab in labels:
            if lab not in self.labels:
                raise UnknownLabel(f"label {lab!r} not in label inventory")
            idx.add(self.labels.index_of[lab])
        self.entries[form] = self.entries.get(form, frozenset()) | idx

    def union(self, other: "MorphLexicon") -> "MorphLexicon":
        if other.labels != self.labels:
            raise ValueError("cannot merge lexicons over different label inventories")
        merged = dict(self.entries)
        for form, idx in other.entries.items():
            merged[form] = merged.get(form, frozenset()) | idx
        return MorphLexicon(self.labels, merged, self.lowercase_fallback)


def load_lexicon(path: str | Path, labels: LabelInventory,
                 lowercase_fallback: bool = True) -> MorphLexicon:
    lex = MorphLexicon(labels, lowercase_fallback=lowercase_fallback)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise MalformedLexiconLine(f"{path}:{lineno}: expected 'form<TAB>labels', got {line!r}")
            form, raw = parts
            labs = [lab.strip() for lab in raw.split(";") if lab.strip()]
            try:
                lex.add(form, labs)
            except UnknownLabel as exc:
                raise UnknownLabel(f"{path}:{lineno}: {exc}") from None
    return lex


def encode_nhot(lexicon: MorphLexicon, form: str, dtype=np.float64) -> np.ndarray:
    """Indicator vector over the label inventory; all zeros for forms not in the lexicon."""
    vec = np.zeros(len(lexicon.labels), dtype=dtype)
    found = lexicon.lookup(form)
    if found:
        vec[sorted(found)] = 1
    return vec


@dataclass(frozen=True)
class CoverageReport:
    total: int
    in_vocab: int
    lexicon_only: int
    unknown: int

    def _frac(self, n):
        return n / self.total if self.total else 0.0

    @property
    def in_vocab_fraction(self):
        return self._frac(self.in_vocab)

    @property
    def lexicon_only_fraction(self):
        return self._frac(self.lexicon_only)

    @property
    def unknown_fraction(self):
        return self._frac(self.unknown)


def coverage(lexicon: MorphLexicon | None, corpus: TaggedCorpus, vocab: Vocabulary) -> CoverageReport:
    in_vocab = lex_only = unknown = 0
    for form in corpus.forms():
        if form in vocab:
            in_vocab += 1
        elif lexicon is not None and form in lexicon:
            lex_only += 1
        else:
            unknown += 1
    return CoverageReport(in_vocab + lex_only + unknown, in_vocab, lex_only, unknown)
