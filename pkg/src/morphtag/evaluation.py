"""Accuracy reports, error reduction, confusion ranking and cross-validation."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Sentence, TaggedCorpus, Vocabulary, folds_split
from .errors import AlignmentError, DegenerateBaseline
from .lexicon import MorphLexicon


@dataclass
class EvalReport:
    total_tokens: int = 0
    correct_tokens: int = 0
    known_tokens: int = 0
    known_correct: int = 0
    unknown_count: int = 0
    unknown_correct: int = 0
    coarse_correct: int = 0
    confusion: Counter = field(default_factory=Counter)  # (predicted, gold) -> count

    @property
    def accuracy(self) -> float:
        return self.correct_tokens / self.total_tokens if self.total_tokens else float("nan")

    @property
    def known_accuracy(self) -> float | None:
        return self.known_correct / self.known_tokens if self.known_tokens else None

    @property
    def unknown_accuracy(self) -> float | None:
        """None when there are no unknown tokens (the partition is empty)."""
        return self.unknown_correct / self.unknown_count if self.unknown_count else None

    @property
    def coarse_accuracy(self) -> float:
        return self.coarse_correct / self.total_tokens if self.total_tokens else float("nan")

    @property
    def errors(self) -> int:
        return self.total_tokens - self.correct_tokens

    def merge(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(
            self.total_tokens + other.total_tokens,
            self.correct_tokens + other.correct_tokens,
            self.known_tokens + other.known_tokens,
            self.known_correct + other.known_correct,
            self.unknown_count + other.unknown_count,
            self.unknown_correct + other.unknown_correct,
            self.coarse_correct + other.coarse_correct,
            self.confusion + other.confusion,
        )


def evaluate(pred: Sequence[Sequence[str]], gold: TaggedCorpus | Sequence[Sentence],
             vocab: Vocabulary | None = None, lexicon: MorphLexicon | None = None) -> EvalReport:
    """Score predicted tag sequences against gold sentences.

    A token counts as known when its form is in the training vocabulary or,
    if a lexicon is given, in the lexicon.  Without a vocabulary every token
    is treated as known only if the lexicon covers it.
    """
    sentences = list(gold.sentences if isinstance(gold, TaggedCorpus) else gold)
    if len(pred) != len(sentences):
        raise AlignmentError(f"{len(pred)} predicted sentences for {len(sentences)} gold sentences")
    rep = EvalReport()
    for si, (p_tags, sent) in enumerate(zip(pred, sentences)):
        if len(p_tags) != len(sent):
            where = f" (gold line {sent.line})" if sent.line else ""
            raise AlignmentError(
                f"sentence {si + 1}{where}: {len(p_tags)} predicted tags for {len(sent)} tokens")
        for p_tag, tok in zip(p_tags, sent.tokens):
            p_tag = str(p_tag)
            ok = p_tag == tok.tag
            known = (vocab is not None and tok.form in vocab) or \
                    (lexicon is not None and tok.form in lexicon)
            rep.total_tokens += 1
            rep.correct_tokens += ok
            rep.coarse_correct += p_tag[:1] == tok.tag[:1]
            if known:
                rep.known_tokens += 1
                rep.known_correct += ok
            else:
                rep.unknown_count += 1
                rep.unknown_correct += ok
            if not ok:
                rep.confusion[(p_tag, tok.tag)] += 1
    return rep


def error_reduction(baseline_acc: float, new_acc: float) -> float:
    """Relative error reduction in percent; accuracies are percentages."""
    if baseline_acc >= 100:
        raise DegenerateBaseline("baseline accuracy of 100% leaves no error to reduce")
    if not (0 <= baseline_acc <= 100 and 0 <= new_acc <= 100):
        raise ValueError("accuracies must be percentages in [0, 100]")
    return (new_acc - baseline_acc) / (100.0 - baseline_acc) * 100.0


def top_confusions(report: EvalReport, k: int = 10) -> list[tuple[str, float]]:
    """The k most frequent ``pred>gold`` error pairs with their share of all errors (%)."""
    total = sum(report.confusion.values())
    if total == 0:
        return []
    ranked = sorted(((f"{p}>{g}", n) for (p, g), n in report.confusion.items()),
                    key=lambda item: (-item[1], item[0]))
    return [(key, n / total * 100.0) for key, n in ranked[:k]]


def _pct(x):
    return "NA" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{100 * x:.2f}"


def format_report(report: EvalReport, title: str = "", baseline_acc: float | None = None, k: int = 10) -> str:
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'tokens':<16}{report.total_tokens}")
    lines.append(f"{'accuracy':<16}{_pct(report.accuracy)}")
    lines.append(f"{'known':<16}{_pct(report.known_accuracy)}  ({report.known_tokens} tokens)")
    lines.append(f"{'unknown':<16}{_pct(report.unknown_accuracy)}  ({report.unknown_count} tokens)")
    lines.append(f"{'category acc':<16}{_pct(report.coarse_accuracy)}")
    if baseline_acc is not None:
        er = error_reduction(baseline_acc, 100 * report.accuracy)
        lines.append(f"{'error reduction':<16}{er:.1f}  (vs {baseline_acc})")
    conf = top_confusions(report, k)
    if conf:
        lines.append("")
        lines.append("No.  pred>gold        errors")
        for i, (pair, share) in enumerate(conf, 1):
            lines.append(f"{i:>3}. {pair:<16} {share:6.2f}%")
    return "\n".join(lines) + "\n"


def report_kv(report: EvalReport, baseline_acc: float | None = None) -> str:
    """Flat ``key=value`` lines; accuracies in percent, NA for empty partitions."""
    rows = [
        ("accuracy", _pct(report.accuracy)),
        ("known_acc", _pct(report.known_accuracy)),
        ("unknown_acc", _pct(report.unknown_accuracy)),
        ("unknown_count", report.unknown_count),
        ("total_tokens", report.total_tokens),
        ("correct_tokens", report.correct_tokens),
        ("coarse_acc", _pct(report.coarse_accuracy)),
    ]
    if baseline_acc is not None:
        rows.append(("error_reduction", f"{error_reduction(baseline_acc, 100 * report.accuracy):.1f}"))
    for (p, g), n in sorted(report.confusion.items()):
        rows.append((f"confusion.{p}.{g}", n))
    return "".join(f"{k}={v}\n" for k, v in rows)


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            out[key] = value
    return out


@dataclass
class FoldResult:
    fold: int
    seed: int
    report: EvalReport
    train_sentences: int
    test_sentences: int


@dataclass
class CrossValidation:
    folds: list[FoldResult]

    @property
    def total(self) -> EvalReport:
        out = EvalReport()
        for f in self.folds:
            out = out.merge(f.report)
        return out

    @property
    def mean_accuracy(self) -> float:
        """Token-weighted mean over folds."""
        return self.total.accuracy

    @property
    def std_accuracy(self) -> float:
        accs = [f.report.accuracy for f in self.folds]
        m = sum(accs) / len(accs)
        return math.sqrt(sum((a - m) ** 2 for a in accs) / len(accs))

    def summary(self) -> str:
        lines = ["fold\tseed\ttokens\taccuracy\tknown\tunknown"]
        for f in self.folds:
            r = f.report
            lines.append(f"{f.fold}\t{f.seed}\t{r.total_tokens}\t{_pct(r.accuracy)}\t"
                         f"{_pct(r.known_accuracy)}\t{_pct(r.unknown_accuracy)}")
        t = self.total
        lines.append(f"mean\t-\t{t.total_tokens}\t{_pct(t.accuracy)}\t"
                     f"{_pct(t.known_accuracy)}\t{_pct(t.unknown_accuracy)}")
        lines.append(f"std\t-\t-\t{100 * self.std_accuracy:.2f}\t-\t-")
        return "\n".join(lines) + "\n"


def run_fold(corpus: TaggedCorpus, fold: int, config, lexicon=None, fine=None):
    """Train on every fold but *fold*, test on *fold*; the seed is config.seed + fold."""
    from .tagger import fit, tag_corpus
    from .tagset import build_inventory
    train_c, test_c = folds_split(corpus, fold)
    seed = config.seed + fold
    fine = fine or build_inventory(corpus.tag_set())
    model, _ = fit(config.replace(seed=seed), train_c, fine, lexicon)
    pred = tag_corpus(model, test_c.sentences)
    report = evaluate(pred, test_c, model.vocab, lexicon if config.mode.uses_lexicon else None)
    return FoldResult(fold, seed, report, len(train_c), len(test_c))


def cross_validate(corpus: TaggedCorpus, config, lexicon: MorphLexicon | None = None,
                   fine=None, jobs: int = 1, on_fold=None) -> CrossValidation:
    if corpus.k < 2:
        raise ValueError("cross-validation needs at least 2 folds")
    folds = range(corpus.k)
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_fold, corpus, f, config, lexicon, fine) for f in folds]
            for fut in futures:
                results.append(fut.result())
                if on_fold:
                    on_fold(results[-1])
    else:
        for f in folds:
            results.append(run_fold(corpus, f, config, lexicon, fine))
            if on_fold:
                on_fold(results[-1])
    return CrossValidation(results)
