"""Command line entry point.

    whyrank build-index --corpus DIR_OR_JSONL --out corpus.idx
    whyrank build-stats --reference DIR_OR_JSONL --out ref.stats
    whyrank ask --index corpus.idx --stats ref.stats --question "Why ...?" --setup 1
    whyrank eval --index corpus.idx --stats ref.stats --questions q.tsv --gold gold.tsv \
        --cutoffs 10,150 --setup 1 --out report.json

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from whyrank.answers import answers_to_jsonl
from whyrank.errors import WhyRankError
from whyrank.metrics import read_gold, read_questions, report_json
from whyrank.pipeline import Pipeline, PipelineConfig, config_header
from whyrank.relatedness import build_stats
from whyrank.retrieval import index_corpus

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cutoffs(value: str) -> list[int]:
    try:
        out = [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cutoff list {value!r}")
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("cutoffs must be positive integers")
    return out


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--index", required=True)
    p.add_argument("--stats", help="PMI stats file; not read by setup 3")
    p.add_argument("--setup", type=int, choices=[1, 2, 3, 4], default=1)
    p.add_argument("--beta", type=float)
    p.add_argument("--top-k", type=int)
    p.add_argument("--epsilon-pmi", type=float)
    p.add_argument("--counting", choices=["occurrences", "distinct"])
    p.add_argument("--stopwords")
    p.add_argument("--verbs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="whyrank", description="Rank answers to why-questions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-index", help="index a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build-stats", help="count PMI statistics over a reference corpus")
    p.add_argument("--reference", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ask", help="rank answers for one question")
    p.add_argument("--question", required=True)
    _add_run_options(p)

    p = sub.add_parser("eval", help="evaluate against a gold standard")
    p.add_argument("--questions", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--cutoffs", type=_cutoffs, default=[10, 150])
    _add_run_options(p)
    return parser


def _config(args) -> PipelineConfig:
    overrides = {}
    for opt, name in [("beta", "beta"), ("top_k", "top_k_docs"),
                      ("epsilon_pmi", "epsilon_pmi"), ("counting", "occurrence_counting")]:
        value = getattr(args, opt)
        if value is not None:
            overrides[name] = value
    if args.top_k is not None and args.top_k < 1:
        raise UsageError("--top-k must be >= 1")
    if args.beta is not None and not 0 <= args.beta <= 1:
        raise UsageError("--beta must be in [0, 1]")
    cfg = PipelineConfig.for_setup(
        args.setup, index_path=args.index, stats_path=args.stats,
        stopwords_path=args.stopwords, verbs_path=args.verbs, workers=args.workers, **overrides)
    if cfg.needs_stats and not args.stats:
        raise UsageError(f"--stats is required for setup {args.setup}")
    return cfg


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    if args.command == "build-index":
        index = index_corpus(args.corpus)
        index.save(args.out)
        print(f"indexed {index.n_docs} documents, {len(index.postings)} terms -> {args.out}")
    elif args.command == "build-stats":
        stats = build_stats(args.reference, workers=args.workers)
        stats.save(args.out)
        print(f"counted {stats.n_docs} reference documents -> {args.out}")
    elif args.command == "ask":
        pipe = Pipeline.from_config(_config(args))
        answers = pipe.run_question(args.question)
        _write(answers_to_jsonl(answers, config_header(pipe.cfg, pipe.lex)), args.out)
    elif args.command == "eval":
        pipe = Pipeline.from_config(_config(args))
        gold = read_gold(args.gold)
        report = pipe.run_eval(read_questions(args.questions), gold, args.cutoffs)
        _write(report_json(report, config_header(pipe.cfg, pipe.lex)), args.out)
        if args.out:
            print(report.table_header())
            print(report.table_row(f"SETUP-{args.setup}"))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except UsageError as exc:
        print(f"whyrank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WhyRankError, OSError, ValueError) as exc:
        print(f"whyrank: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
