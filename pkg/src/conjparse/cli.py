"""Command-line interface: train, parse, evaluate, analyze, gradcheck.

Exit codes: 0 success, 2 usage error (argparse), 3 data/resource error,
4 model-file error, 1 anything else.  Configuration precedence is
command-line flags over a JSON config file over built-in defaults; the
effective configuration is echoed at the start of every training run.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from typing import List, Optional

from . import corpus_stats, evaluation, training
from .model import Hyperparams, Model, ModelIOError, Vocabulary
from .parser import greedy_parse
from .resources import (
    EmbeddingTable,
    FeatureResources,
    LemmaLexicon,
    ResourceError,
    SentimentLexicon,
)
from .transitions import OracleError
from .treebank import (
    ConllError,
    LabelInventory,
    is_projective,
    read_conll,
    write_conll_file,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_OTHER = 1

_HP_FLOAT_FIELDS = {
    f.name for f in fields(Hyperparams) if f.type in ("float", float)
}


def _add_resource_flags(sub):
    sub.add_argument("--embeddings", help="pretrained embedding text file")
    sub.add_argument("--lemma-lexicon", help="TSV lemma lexicon")
    sub.add_argument("--sentiment-pos", help="positive word list")
    sub.add_argument("--sentiment-neg", help="negative word list")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conjparse",
        description="Greedy arc-hybrid dependency parser with "
                    "coordination-symmetry features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a parser model")
    train.add_argument("--train", required=True, help="training treebank")
    train.add_argument("--dev", help="development treebank for model selection")
    train.add_argument("--model", required=True, help="output model path")
    train.add_argument("--format", choices=("conllx", "conllu"), default="conllx")
    train.add_argument("--epochs", type=int, default=10)
    train.add_argument("--seed", type=int, required=True)
    train.add_argument("--config", help="JSON file with hyperparameter overrides")
    train.add_argument("--no-conj-features", action="store_true",
                       help="disable the coordination scorer")
    train.add_argument("--no-single-root", action="store_true",
                       help="allow several root attachments when decoding")
    train.add_argument("--tune-pretrained", action="store_true",
                       help="update pretrained embeddings during training")
    train.add_argument("--hyper", action="append", default=[],
                       metavar="NAME=VALUE",
                       help="override one hyperparameter (repeatable)")
    _add_resource_flags(train)

    parse = sub.add_parser("parse", help="parse a treebank with a trained model")
    parse.add_argument("--model", required=True)
    parse.add_argument("--input", required=True)
    parse.add_argument("--output", required=True)
    parse.add_argument("--format", choices=("conllx", "conllu"), default="conllx")
    parse.add_argument("--no-single-root", action="store_true")
    _add_resource_flags(parse)

    evaluate = sub.add_parser("evaluate", help="score predictions against gold")
    evaluate.add_argument("--gold", required=True)
    evaluate.add_argument("--pred", required=True)
    evaluate.add_argument("--pred-b", help="second prediction file: also emit "
                                           "a two-system conj diff")
    evaluate.add_argument("--format", choices=("conllx", "conllu"), default="conllx")
    evaluate.add_argument("--tsv", action="store_true",
                          help="emit machine-readable TSV instead of a table")
    evaluate.add_argument("--diff-label", default="conj")
    _add_resource_flags(evaluate)

    analyze = sub.add_parser("analyze", help="corpus statistics per label")
    analyze.add_argument("--input", required=True)
    analyze.add_argument("--format", choices=("conllx", "conllu"), default="conllx")
    analyze.add_argument("--label", default="conj",
                         help="label for the top-pairs listing")
    analyze.add_argument("--top", type=int, default=24)
    analyze.add_argument("--markdown", action="store_true")
    _add_resource_flags(analyze)

    gradcheck = sub.add_parser(
        "gradcheck", help="compare analytic gradients with finite differences"
    )
    gradcheck.add_argument("--input", default=None,
                           help="tiny treebank (default: bundled fixture)")
    gradcheck.add_argument("--format", choices=("conllx", "conllu"),
                           default="conllx")
    gradcheck.add_argument("--seed", type=int, default=7)
    gradcheck.add_argument("--step", type=float, default=1e-4)
    gradcheck.add_argument("--tolerance", type=float, default=1e-4)
    gradcheck.add_argument("--corrupt", default=None, help=argparse.SUPPRESS)

    return parser


def load_resources(args) -> FeatureResources:
    lemmas = (
        LemmaLexicon.load(args.lemma_lexicon)
        if getattr(args, "lemma_lexicon", None)
        else LemmaLexicon.empty()
    )
    if getattr(args, "sentiment_pos", None) and getattr(args, "sentiment_neg", None):
        sentiment = SentimentLexicon.load(args.sentiment_pos, args.sentiment_neg)
    else:
        if getattr(args, "sentiment_pos", None) or getattr(args, "sentiment_neg", None):
            print("warning: need both sentiment lists; using neutral sentiment",
                  file=sys.stderr)
        sentiment = SentimentLexicon.empty()
    embeddings = (
        EmbeddingTable.load(args.embeddings)
        if getattr(args, "embeddings", None)
        else None
    )
    return FeatureResources(lemmas=lemmas, sentiment=sentiment,
                            embeddings=embeddings)


def _apply_hyper_overrides(hp: Hyperparams, pairs: List[str]) -> None:
    valid = {f.name for f in fields(Hyperparams)}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--hyper expects NAME=VALUE, got {pair!r}")
        name, value = pair.split("=", 1)
        if name not in valid:
            raise ValueError(f"unknown hyperparameter {name!r}")
        current = getattr(hp, name)
        if isinstance(current, bool):
            setattr(hp, name, value.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(hp, name, int(value))
        else:
            setattr(hp, name, float(value))


def cmd_train(args) -> int:
    hp = Hyperparams()
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            overrides = json.load(handle)
        for name, value in overrides.items():
            if not hasattr(hp, name):
                raise ValueError(f"unknown hyperparameter {name!r} in config file")
            setattr(hp, name, value)
    _apply_hyper_overrides(hp, args.hyper)
    if args.no_conj_features:
        hp.use_conj_features = False
    if args.no_single_root:
        hp.single_root = False
    if args.tune_pretrained:
        hp.tune_pretrained = True

    resources = load_resources(args)
    train_all = read_conll(args.train, fmt=args.format)
    train_sents = [s for s in train_all if is_projective(s)]
    skipped = len(train_all) - len(train_sents)
    dev_sents = read_conll(args.dev, fmt=args.format) if args.dev else None

    vocab = Vocabulary.from_corpus(train_sents)
    labels = LabelInventory.from_sentences(train_sents)
    model = Model.build(hp, vocab, labels, pretrained=resources.embeddings,
                        seed=args.seed)

    print(f"configuration: {json.dumps(model.hp.to_dict(), sort_keys=True)}")
    print(f"seed: {args.seed}  epochs: {args.epochs}")
    print(f"training sentences: {len(train_sents)} "
          f"(skipped {skipped} non-projective)")
    if dev_sents is not None:
        print(f"dev sentences: {len(dev_sents)}")

    result = training.train_model(
        model, train_sents, resources, epochs=args.epochs, seed=args.seed,
        dev_sentences=dev_sents, log=print,
    )
    if result.best_epoch is not None:
        print(f"best dev LAS {result.best_las:.2f} at epoch {result.best_epoch}; "
              "saving that checkpoint")
    model.save(args.model)
    print(f"model written to {args.model}")
    return EXIT_OK


def cmd_parse(args) -> int:
    model = Model.load(args.model)
    resources = load_resources(args)
    sentences = read_conll(args.input, fmt=args.format)
    single_root = False if args.no_single_root else None
    parsed = [
        greedy_parse(s, model, resources, single_root=single_root)
        for s in sentences
    ]
    write_conll_file(args.output, parsed, fmt=args.format, use_predicted=True)
    print(f"parsed {len(parsed)} sentences into {args.output}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    gold = read_conll(args.gold, fmt=args.format)
    pred = read_conll(args.pred, fmt=args.format, require_tree=False)
    report = evaluation.evaluate(gold, pred)
    print(evaluation.report_tsv(report) if args.tsv
          else evaluation.report_table(report), end="")
    if args.pred_b:
        pred_b = read_conll(args.pred_b, fmt=args.format, require_tree=False)
        resources = load_resources(args)
        diff = evaluation.conj_diff(gold, pred, pred_b, resources,
                                    label=args.diff_label)
        print()
        print(evaluation.diff_table(diff), end="")
        print()
        print(evaluation.diff_case_lines(diff), end="")
    return EXIT_OK


def cmd_analyze(args) -> int:
    sentences = read_conll(args.input, fmt=args.format)
    if not getattr(args, "sentiment_pos", None):
        print("warning: no sentiment lists given; sentiment columns are "
              "all-neutral", file=sys.stderr)
    resources = load_resources(args)
    stats = corpus_stats.label_stats(sentences, resources)
    pairs = corpus_stats.top_pairs(sentences, args.label, args.top)
    if args.markdown:
        print(corpus_stats.stats_markdown(stats), end="")
        print()
        print(corpus_stats.pairs_markdown(pairs), end="")
    else:
        print(corpus_stats.stats_tsv(stats), end="")
        print()
        print(corpus_stats.pairs_tsv(pairs), end="")
    return EXIT_OK


def _bundled_gradcheck_fixture() -> str:
    import importlib.resources

    candidate = importlib.resources.files("conjparse").joinpath(
        "data/gradcheck.conllx"
    )
    return str(candidate)


def cmd_gradcheck(args) -> int:
    path = args.input or _bundled_gradcheck_fixture()
    sentences = [s for s in read_conll(path, fmt=args.format) if is_projective(s)]
    if not sentences:
        raise ValueError("gradcheck needs at least one projective sentence")
    hp = Hyperparams(
        word_dim=6, pos_dim=3, lstm_layers=2, lstm_dim=5, mlp_dim=8,
        conj_mlp_dim=7, word_dropout_alpha=0.0,
    )
    vocab = Vocabulary.from_corpus(sentences)
    labels = LabelInventory.from_sentences(sentences)
    model = Model.build(hp, vocab, labels, seed=args.seed)
    # Check at a generic random point: the fresh init keeps all transition
    # scores nearly tied, right on the hinge loss's kinks.
    training.jitter_params(model, seed=args.seed + 1)
    report = training.gradient_check(
        model, sentences, FeatureResources.empty(),
        step=args.step, tolerance=args.tolerance, corrupt_key=args.corrupt,
    )
    for entry in report.entries:
        status = "ok" if entry.max_rel_error < args.tolerance else "FAIL"
        print(f"{entry.key:<20} max_rel_err={entry.max_rel_error:.3e} "
              f"({entry.checked} values) {status}")
    print(f"distance to nearest hinge kink: {report.kink_margin:.3e}")
    print(f"overall max relative error: {report.max_rel_error:.3e} "
          f"(tolerance {args.tolerance:g})")
    if not report.passed:
        print("gradient check FAILED")
        return EXIT_OTHER
    print("gradient check passed")
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "parse": cmd_parse,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
    "gradcheck": cmd_gradcheck,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ModelIOError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ConllError, ResourceError, OracleError, training.NonProjectiveError,
            evaluation.MisalignedCorporaError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
