import numpy as np
import pytest

from morphtag.corpus import Sentence, TaggedCorpus
from morphtag.lexicon import LabelInventory, MorphLexicon
from morphtag.tagger import ModelConfig

TINY = dict(word_dim=4, char_dim=3, char_hidden=3, sentence_hidden=5, ff_hidden=4)


@pytest.fixture
def tiny_config():
    return ModelConfig(**TINY)


@pytest.fixture
def small_corpus():
    sents = [
        [("Maður", "nken"), ("gekk", "sfg3eþ"), ("heim", "aa"), (".", "x")],
        [("strætó", "nken"), ("kom", "sfg3eþ"), ("og", "c"), ("fór", "sfg3eþ")],
        [("hún", "fpven"), ("sá", "sfg3eþ"), ("strætó", "nkeo")],
        [("maður", "nken"), ("og", "c"), ("kona", "nven")],
    ]
    return TaggedCorpus.from_sentences([Sentence.from_pairs(s) for s in sents], k=2)


@pytest.fixture
def labels():
    return LabelInventory(["no", "masc", "fem", "sing", "nom", "acc", "dat", "verb"])


@pytest.fixture
def lexicon(labels):
    lex = MorphLexicon(labels)
    lex.add("strætó", ["no", "masc", "sing", "nom", "acc", "dat"])
    lex.add("maður", ["no", "masc", "sing", "nom"])
    lex.add("kona", ["no", "fem", "sing", "nom"])
    lex.add("gekk", ["verb"])
    return lex


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance results collected by tests/test_acceptance.py, echoed in the summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
