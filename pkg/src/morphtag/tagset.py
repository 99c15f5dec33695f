"""Mnemonic tags, closed tag inventories and the coarse (lexical category) projection.

A mnemonic tag is a short string whose first character names the lexical
category and whose remaining characters (at most six) encode features such
as gender, number and case, e.g. ``nken``.  Validation here is purely
structural; the tagset file is the authority on which tags exist.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import EmptyTag, EmptyTagsetError, TagTooLong

MAX_TAG_LENGTH = 7


@dataclass(frozen=True, slots=True)
class MnemonicTag:
    raw: str

    @property
    def category(self) -> str:
        return self.raw[0]

    def __str__(self):
        return self.raw


def parse_tag(raw: str) -> MnemonicTag:
    if not raw:
        raise EmptyTag("empty tag")
    if len(raw) > MAX_TAG_LENGTH:
        raise TagTooLong(f"tag {raw!r} has {len(raw)} characters (max {MAX_TAG_LENGTH})")
    return MnemonicTag(raw)


def coarse_of(tag: MnemonicTag | str) -> str:
    if isinstance(tag, MnemonicTag):
        return tag.category
    return parse_tag(tag).category


class _Inventory:
    """Ordered, bijective symbol <-> index mapping."""

    def __init__(self, symbols: Sequence[str]):
        self._symbols = tuple(symbols)
        self.index_of = {s: i for i, s in enumerate(self._symbols)}
        assert len(self.index_of) == len(self._symbols), "duplicate symbols"

    def __len__(self):
        return len(self._symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self._symbols)

    def __contains__(self, symbol):
        return symbol in self.index_of

    def __getitem__(self, i: int) -> str:
        return self._symbols[i]

    def __eq__(self, other):
        return type(self) is type(other) and self._symbols == other._symbols

    def __hash__(self):
        return hash(self._symbols)

    def __repr__(self):
        return f"{type(self).__name__}({len(self)} symbols)"

    @property
    def symbols(self) -> tuple[str, ...]:
        return self._symbols


class TagInventory(_Inventory):
    """Fine-grained tag inventory, lexicographically ordered."""

    @property
    def tags(self) -> tuple[MnemonicTag, ...]:
        return tuple(MnemonicTag(t) for t in self._symbols)


class CoarseInventory(_Inventory):
    """Lexical categories: the distinct first characters of a fine inventory."""

    @property
    def categories(self) -> tuple[str, ...]:
        return self._symbols


def build_inventory(tags: Iterable[str | MnemonicTag]) -> TagInventory:
    unique = {parse_tag(str(t)).raw for t in tags}
    if not unique:
        raise EmptyTagsetError("no tags supplied")
    return TagInventory(sorted(unique))


def build_coarse_inventory(fine: TagInventory) -> CoarseInventory:
    return CoarseInventory(sorted({t[0] for t in fine}))


def load_tagset(path: str | Path) -> TagInventory:
    """Read a tagset file: one tag per line, trailing whitespace trimmed."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return build_inventory(line.rstrip() for line in lines if line.rstrip())


def write_tagset(inventory: TagInventory, path: str | Path) -> None:
    Path(path).write_text("".join(t + "\n" for t in inventory), encoding="utf-8")
