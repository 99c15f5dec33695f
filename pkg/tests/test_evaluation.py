import pytest
from hypothesis import given, settings, strategies as st

from conftest import TINY
from morphtag.corpus import Sentence, TaggedCorpus, build_vocabulary
from morphtag.errors import AlignmentError, DegenerateBaseline
from morphtag.evaluation import (
    EvalReport,
    cross_validate,
    error_reduction,
    evaluate,
    format_report,
    parse_kv,
    report_kv,
    top_confusions,
)
from morphtag.lexicon import MorphLexicon
from morphtag.synthetic import overfit_corpus
from morphtag.tagger import ModelConfig


def gold_corpus():
    return TaggedCorpus.from_sentences([
        Sentence.from_pairs([("í", "aþ"), ("gær", "aa")]),
        Sentence.from_pairs([("á", "ao"), ("bát", "nkeo")]),
    ])


def test_accuracy():
    gold = gold_corpus()
    train_vocab = build_vocabulary([gold.sentences[0]])
    rep = evaluate([["aþ", "aa"], ["ao", "nkeþ"]], gold, train_vocab)
    assert rep.accuracy == 0.75
    assert rep.known_tokens == 2 and rep.known_accuracy == 1.0
    assert rep.unknown_count == 2 and rep.unknown_accuracy == 0.5
    assert rep.confusion == {("nkeþ", "nkeo"): 1}
    assert rep.coarse_accuracy == 1.0


def test_lexicon_makes_words_known(labels):
    gold = gold_corpus()
    lex = MorphLexicon(labels)
    for f in ["í", "gær", "á", "bát"]:
        lex.add(f, ["no"])
    rep = evaluate([s.tags for s in gold], gold, build_vocabulary([gold.sentences[0]]), lex)
    assert rep.unknown_count == 0
    assert rep.unknown_accuracy is None
    assert "unknown_acc=NA" in report_kv(rep)


def test_out_of_inventory_prediction_counts_as_error():
    gold = gold_corpus()
    rep = evaluate([["zzz", "aa"], ["ao", "nkeo"]], gold)
    assert rep.correct_tokens == 3


def test_alignment_errors():
    gold = gold_corpus()
    with pytest.raises(AlignmentError):
        evaluate([["aþ", "aa"]], gold)
    with pytest.raises(AlignmentError, match="sentence 2"):
        evaluate([["aþ", "aa"], ["ao"]], gold)


def test_error_reduction_values():
    assert error_reduction(93.84, 95.15) == pytest.approx(21.27, abs=0.005)
    assert round(error_reduction(93.84, 95.15), 1) == 21.3
    assert error_reduction(90, 90) == 0
    assert error_reduction(50, 100) == 100
    with pytest.raises(DegenerateBaseline):
        error_reduction(100, 100)


@given(st.floats(0, 99.9), st.floats(0, 100), st.floats(0, 100))
def test_error_reduction_monotone(base, a, b):
    lo, hi = sorted((a, b))
    assert error_reduction(base, lo) <= error_reduction(base, hi)


def test_top_confusions():
    rep = EvalReport(total_tokens=10, correct_tokens=6)
    rep.confusion.update({("a", "b"): 3, ("c", "d"): 1})
    assert top_confusions(rep, 10) == [("a>b", 75.0), ("c>d", 25.0)]
    assert top_confusions(EvalReport(total_tokens=4, correct_tokens=4)) == []


def test_top_confusion_ties_are_lexicographic():
    rep = EvalReport()
    rep.confusion.update({("ao", "aþ"): 2, ("aþ", "ao"): 2, ("c", "ct"): 2, ("nveo", "nveþ"): 5})
    assert [p for p, _ in top_confusions(rep, 3)] == ["nveo>nveþ", "ao>aþ", "aþ>ao"]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc")), min_size=1, max_size=60))
def test_report_invariants(pairs):
    sents = [Sentence.from_pairs([(f"w{i}", g)]) for i, (_, g) in enumerate(pairs)]
    vocab = build_vocabulary(sents[::2])
    pred = [[p] for p, _ in pairs]
    rep = evaluate(pred, sents, vocab)
    assert rep == evaluate(pred, sents, vocab)
    assert rep.known_tokens + rep.unknown_count == rep.total_tokens
    assert rep.known_correct + rep.unknown_correct == rep.correct_tokens
    assert rep.accuracy == rep.correct_tokens / rep.total_tokens
    conf = top_confusions(rep, 100)
    if rep.errors:
        assert sum(s for _, s in conf) == pytest.approx(100.0, abs=1e-9)
    else:
        assert conf == []


def test_report_formats():
    rep = evaluate([["aþ", "aa"], ["ao", "nkeþ"]], gold_corpus())
    kv = parse_kv(report_kv(rep, baseline_acc=50.0))
    assert kv["accuracy"] == "75.00"
    assert kv["unknown_count"] == "4"
    assert kv["known_acc"] == "NA"
    assert kv["confusion.nkeþ.nkeo"] == "1"
    assert kv["error_reduction"] == "50.0"
    text = format_report(rep, "toy", baseline_acc=50.0)
    assert "nkeþ>nkeo" in text and "75.00" in text


def test_cross_validate_smoke():
    corpus = TaggedCorpus.from_sentences(overfit_corpus(0, n_sentences=4).sentences, k=2)
    cv = cross_validate(corpus, ModelConfig(**TINY, epochs=1))
    assert len(cv.folds) == 2
    total = sum(f.report.total_tokens for f in cv.folds)
    correct = sum(f.report.correct_tokens for f in cv.folds)
    assert total == corpus.n_tokens
    assert cv.mean_accuracy == pytest.approx(correct / total, abs=1e-12)
    assert [f.seed for f in cv.folds] == [0, 1]


def test_cross_validation_folds_reproducible():
    corpus = TaggedCorpus.from_sentences(overfit_corpus(1, n_sentences=6).sentences, k=3)
    cfg = ModelConfig(**TINY, epochs=2, seed=4)
    a = cross_validate(corpus, cfg)
    b = cross_validate(corpus, cfg)
    assert [f.report for f in a.folds] == [f.report for f in b.folds]
    assert [f.seed for f in a.folds] == [4, 5, 6]


def test_cross_validate_parallel_matches_serial():
    corpus = TaggedCorpus.from_sentences(overfit_corpus(2, n_sentences=6).sentences, k=2)
    cfg = ModelConfig(**TINY, epochs=1)
    serial = cross_validate(corpus, cfg)
    parallel = cross_validate(corpus, cfg, jobs=2)
    assert [f.report for f in serial.folds] == [f.report for f in parallel.folds]
