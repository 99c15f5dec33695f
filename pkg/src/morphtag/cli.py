"""Command-line interface: train, tag, eval, xval, inspect.

Exit codes: 0 success, 1 data/model/runtime error, 2 usage error.
Settings are resolved as command-line flags > ``--config`` JSON file >
built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import evaluation
from .corpus import load_corpus, read_sentences, write_corpus
from .errors import MorphtagError
from .lexicon import load_labels, load_lexicon
from .tagger import Mode, ModelConfig, fit, load_model, save_model, tag_corpus, write_trace
from .tagset import load_tagset

log = logging.getLogger("morphtag")

MODES = {"baseline": Mode.BASELINE, "dmii": Mode.WITH_LEXICON, "lc": Mode.WITH_LEXICON_AND_COARSE}

# flag dest -> ModelConfig field
_CONFIG_FLAGS = {
    "epochs": "epochs", "lr": "base_rate", "decay": "decay", "seed": "seed",
    "word_dim": "word_dim", "char_dim": "char_dim", "char_hidden": "char_hidden",
    "sentence_hidden": "sentence_hidden", "ff_hidden": "ff_hidden",
    "coarse_hints": "coarse_hints", "dtype": "dtype",
}


def _add_model_flags(p):
    p.add_argument("--mode", choices=sorted(MODES), help="model variant (default: baseline)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float, help="initial learning rate (default 0.13)")
    p.add_argument("--decay", type=float, help="per-epoch learning-rate decay (default 0.05)")
    p.add_argument("--seed", type=int)
    p.add_argument("--word-dim", dest="word_dim", type=int)
    p.add_argument("--char-dim", dest="char_dim", type=int)
    p.add_argument("--char-hidden", dest="char_hidden", type=int)
    p.add_argument("--sentence-hidden", dest="sentence_hidden", type=int)
    p.add_argument("--ff-hidden", dest="ff_hidden", type=int)
    p.add_argument("--coarse-hints", dest="coarse_hints", choices=["predicted", "gold"])
    p.add_argument("--dtype", choices=["float64", "float32"])


def _add_lexicon_flags(p):
    p.add_argument("--lexicon", help="lexicon file (form<TAB>label;label...)")
    p.add_argument("--labels", help="lexicon label inventory, one label per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morphtag", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with default flag values")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-epoch progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a tagged corpus")
    p.add_argument("--corpus")
    p.add_argument("--tagset")
    p.add_argument("--folds", help="fold file; with --test-fold, that fold is held out")
    p.add_argument("--test-fold", dest="test_fold", type=int)
    p.add_argument("--out", help="model file to write; the trace goes next to it as .trace")
    _add_lexicon_flags(p)
    _add_model_flags(p)

    p = sub.add_parser("tag", help="tag a file of word forms")
    p.add_argument("--model")
    p.add_argument("--input", help="one form per line, blank line between sentences")
    p.add_argument("--out", help="output file (default: standard output)")
    _add_lexicon_flags(p)

    p = sub.add_parser("eval", help="score predictions against a gold corpus")
    p.add_argument("--corpus", help="gold corpus")
    p.add_argument("--input", help="predicted corpus (form<TAB>tag)")
    p.add_argument("--model", help="model whose training vocabulary defines known words")
    p.add_argument("--out", help="report prefix: writes PREFIX.txt and PREFIX.kv")
    p.add_argument("--baseline-acc", dest="baseline_acc", type=float,
                   help="accuracy (%%) to compute the error reduction against")
    _add_lexicon_flags(p)

    p = sub.add_parser("xval", help="k-fold cross-validation")
    p.add_argument("--corpus")
    p.add_argument("--tagset")
    p.add_argument("--folds", help="fold file (one fold id per sentence)")
    p.add_argument("--k", type=int, help="number of round-robin folds when no fold file is given")
    p.add_argument("--out", help="directory for per-fold and summary reports")
    p.add_argument("--jobs", type=int, help="folds trained in parallel (default 1)")
    p.add_argument("--baseline-acc", dest="baseline_acc", type=float)
    _add_lexicon_flags(p)
    _add_model_flags(p)

    p = sub.add_parser("inspect", help="print model metadata as JSON")
    p.add_argument("--model")
    return parser


def _merge_config_file(args, parser):
    if not args.config:
        return
    try:
        values = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read --config {args.config}: {exc}")
    if not isinstance(values, dict):
        parser.error("--config must hold a JSON object")
    for key, value in values.items():
        key = key.replace("-", "_")
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)


def _require(parser, args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            parser.error(f"the following argument is required for '{args.command}': "
                         f"--{name.replace('_', '-')}")


def _model_config(parser, args) -> ModelConfig:
    overrides = {field: getattr(args, flag) for flag, field in _CONFIG_FLAGS.items()
                 if getattr(args, flag, None) is not None}
    overrides["mode"] = MODES[args.mode or "baseline"]
    try:
        return ModelConfig(**overrides)
    except ValueError as exc:
        parser.error(str(exc))


def _check_lexicon_flags(parser, args, mode: Mode):
    if mode.uses_lexicon:
        for name in ("lexicon", "labels"):
            if getattr(args, name) is None:
                parser.error(f"--mode {args.mode} requires --{name}")


def _load_lexicon(args):
    if args.lexicon is None:
        return None
    if args.labels is None:
        raise MorphtagError("--lexicon needs --labels")
    return load_lexicon(args.lexicon, load_labels(args.labels))


def _trace_path(model_path) -> Path:
    return Path(model_path).with_suffix(".trace")


def cmd_train(parser, args) -> int:
    _require(parser, args, "corpus", "tagset", "out")
    config = _model_config(parser, args)
    _check_lexicon_flags(parser, args, config.mode)
    fine = load_tagset(args.tagset)
    corpus = load_corpus(args.corpus, folds=args.folds, inventory=fine)
    if args.test_fold is not None:
        from .corpus import folds_split
        corpus, _ = folds_split(corpus, args.test_fold)
    lexicon = _load_lexicon(args) if config.mode.uses_lexicon else None
    on_epoch = (lambda phase, r: log.info("[%s] %s", phase, r.line())) if args.verbose else None
    model, traces = fit(config, corpus, fine, lexicon, on_epoch)
    save_model(model, args.out)
    write_trace(traces["fine"], _trace_path(args.out))
    if "coarse" in traces:
        write_trace(traces["coarse"], Path(args.out).with_suffix(".coarse.trace"))
    log.info("wrote %s (%d sentences, %d tokens)", args.out, len(corpus), corpus.n_tokens)
    return 0


def read_forms(path) -> list[list[str]]:
    sentences, current = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            form = line.rstrip("\r\n")
            if not form.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            current.append(form.split("\t")[0])
    if current:
        sentences.append(current)
    return sentences


def cmd_tag(parser, args) -> int:
    _require(parser, args, "model", "input")
    lexicon = _load_lexicon(args)
    model = load_model(args.model, lexicon)
    if model.config.mode.uses_lexicon and lexicon is None:
        parser.error(f"model mode {model.config.mode.value!r} requires --lexicon and --labels")
    sentences = read_forms(args.input)
    tagged = tag_corpus(model, sentences)
    out = [list(zip(forms, tags)) for forms, tags in zip(sentences, tagged)]
    if args.out:
        write_corpus(out, args.out)
    else:
        for i, pairs in enumerate(out):
            if i:
                sys.stdout.write("\n")
            sys.stdout.writelines(f"{f}\t{t}\n" for f, t in pairs)
    return 0


def _write_reports(report, prefix, title, baseline_acc=None):
    text = evaluation.format_report(report, title, baseline_acc)
    kv = evaluation.report_kv(report, baseline_acc)
    Path(str(prefix) + ".txt").write_text(text, encoding="utf-8")
    Path(str(prefix) + ".kv").write_text(kv, encoding="utf-8")
    return text


def cmd_eval(parser, args) -> int:
    _require(parser, args, "corpus", "input")
    gold = read_sentences(args.corpus)
    pred = [s.tags for s in read_sentences(args.input, allow_empty=True)]
    vocab = None
    lexicon = _load_lexicon(args)
    if args.model:
        vocab = load_model(args.model).vocab
    report = evaluation.evaluate(pred, gold, vocab, lexicon)
    if args.out:
        text = _write_reports(report, args.out, f"evaluation of {args.input}", args.baseline_acc)
    else:
        text = evaluation.format_report(report, f"evaluation of {args.input}", args.baseline_acc)
    sys.stdout.write(text)
    return 0


def cmd_xval(parser, args) -> int:
    _require(parser, args, "corpus", "tagset", "out")
    if args.folds is None and args.k is None:
        parser.error("xval needs --folds or --k")
    config = _model_config(parser, args)
    _check_lexicon_flags(parser, args, config.mode)
    fine = load_tagset(args.tagset)
    corpus = load_corpus(args.corpus, folds=args.folds, k=args.k, inventory=fine)
    lexicon = _load_lexicon(args) if config.mode.uses_lexicon else None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def write_fold(res):
        tmp = out / f".fold{res.fold}"
        _write_reports(res.report, tmp, f"fold {res.fold} (seed {res.seed})", args.baseline_acc)
        for ext in (".txt", ".kv"):  # fold-atomic: rename once both files exist
            Path(str(tmp) + ext).replace(out / f"fold{res.fold}{ext}")
        log.info("fold %d: accuracy %.2f%%", res.fold, 100 * res.report.accuracy)

    cv = evaluation.cross_validate(corpus, config, lexicon, fine, jobs=args.jobs or 1, on_fold=write_fold)
    summary = cv.summary()
    _write_reports(cv.total, out / "summary", "all folds", args.baseline_acc)
    (out / "summary.tsv").write_text(summary, encoding="utf-8")
    with open(out / "summary.kv", "a", encoding="utf-8") as fh:
        fh.write(f"mean_accuracy={100 * cv.mean_accuracy:.6f}\n")
        fh.write(f"std_accuracy={100 * cv.std_accuracy:.6f}\n")
        for f in cv.folds:
            fh.write(f"fold.{f.fold}.seed={f.seed}\n")
            fh.write(f"fold.{f.fold}.tokens={f.report.total_tokens}\n")
            fh.write(f"fold.{f.fold}.correct={f.report.correct_tokens}\n")
    sys.stdout.write(summary)
    return 0


def cmd_inspect(parser, args) -> int:
    _require(parser, args, "model")
    model = load_model(args.model)
    info = model.summary()
    info["config"] = model.config.to_dict()
    json.dump(info, sys.stdout, indent=2, sort_keys=True, ensure_ascii=False)
    sys.stdout.write("\n")
    return 0


COMMANDS = {"train": cmd_train, "tag": cmd_tag, "eval": cmd_eval, "xval": cmd_xval,
            "inspect": cmd_inspect}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _merge_config_file(args, parser)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](parser, args)
    except (MorphtagError, OSError, UnicodeDecodeError) as exc:
        print(f"morphtag {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
