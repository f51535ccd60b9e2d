"""Command-line interface.

Exit codes: 0 success, 1 data failure, 2 configuration error, 3 provider
failure, 4 every question filtered as an outlier (report still written).
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import RunConfig, load_config_file, merge_config
from .errors import ConfigError, ProviderError, RagcovError
from .pipeline import run_analysis
from .report import STATUS_NO_INLIERS
from .synth import QuestionGroup, SyntheticSpec, TopicSpec, generate_corpus, write_corpus

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_PROVIDER = 3
EXIT_NO_INLIERS = 4


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file; flags override it")
    p.add_argument("--docs", help="document file or directory")
    p.add_argument("--questions", help="question file (.txt lines or .json array)")
    p.add_argument("--provider", choices=["offline", "openai", "voyage"])
    p.add_argument("--model", help="embedding model name")
    p.add_argument("--api-key-env", dest="api_key_env", help="env var holding the provider key")
    p.add_argument("--embed-dim", dest="embed_dim", type=int, help="offline embedding dimension")
    p.add_argument("--chunk-size", dest="chunk_size", type=int)
    p.add_argument("--chunk-overlap", dest="chunk_overlap", type=int)
    p.add_argument("--clusters", help="cluster count or 'auto'")
    p.add_argument("--seed", type=int)
    p.add_argument("--lof-neighbors", dest="lof_neighbors", type=int)
    p.add_argument("--lof-threshold", dest="lof_threshold", type=float)
    p.add_argument("--multi-threshold", dest="multi_threshold", type=float)
    p.add_argument("--gap-threshold", dest="gap_threshold", type=float)
    p.add_argument("--theme-backend", dest="theme_backend", choices=["offline", "remote"])
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--markdown-out", dest="markdown_out", help="Markdown report path")
    p.add_argument("--plot", action="store_true", default=None, help="write an SVG scatter plot")
    p.add_argument("--cache-dir", dest="cache_dir", help="embedding cache directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ragcov",
        description="Quantify how well a RAG test-question set covers a document corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full coverage analysis")
    _add_run_flags(analyze)

    validate = sub.add_parser("validate", help="check a configuration without running")
    _add_run_flags(validate)

    synth = sub.add_parser("synth", help="generate a synthetic demo corpus")
    synth.add_argument("--out-dir", dest="out_dir", required=True)
    synth.add_argument("--topics", type=int, default=2)
    synth.add_argument("--chunks-per-topic", dest="chunks_per_topic", type=int, default=25)
    synth.add_argument("--questions-per-topic", dest="questions_per_topic", type=int, default=8)
    synth.add_argument("--off-topic-questions", dest="off_topic_questions", type=int, default=0)
    synth.add_argument("--vocab-size", dest="vocab_size", type=int, default=60)
    synth.add_argument("--chunk-words", dest="chunk_words", type=int, default=24)
    synth.add_argument("--question-words", dest="question_words", type=int, default=30)
    synth.add_argument("--seed", type=int, default=0)
    return parser


_RUN_FLAG_KEYS = [
    "docs", "questions", "provider", "model", "api_key_env", "embed_dim",
    "chunk_size", "chunk_overlap", "clusters", "seed", "lof_neighbors",
    "lof_threshold", "multi_threshold", "gap_threshold", "theme_backend",
    "out", "markdown_out", "plot", "cache_dir",
]


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else None
    flag_values = {key: getattr(args, key) for key in _RUN_FLAG_KEYS}
    return merge_config(file_values, flag_values)


def cmd_analyze(cfg: RunConfig) -> int:
    report = run_analysis(cfg)
    if report.coverage is not None:
        cov = report.coverage
        print(f"basic coverage:         {cov.basic * 100.0:.1f}%")
        print(f"weighted coverage:      {cov.weighted * 100.0:.1f}%")
        print(f"multi-cluster coverage: {cov.multi_threshold * 100.0:.1f}%")
        print(f"gaps below {cfg.gap_threshold:g}: {len(report.gaps)}")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"report written to {cfg.out}")
    if report.status == STATUS_NO_INLIERS:
        return EXIT_NO_INLIERS
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    problems = cfg.validate()
    if problems:
        for problem in problems:
            print(f"invalid: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.clusters != "auto":
        print(
            f"note: clusters={cfg.clusters} cannot be checked against the chunk "
            "count before a run",
            file=sys.stderr,
        )
    print(json.dumps(cfg.snapshot(), indent=2))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    names = ["finance", "hardware", "travel", "cooking", "gardening", "astronomy"]
    if args.topics < 1 or args.topics > len(names):
        print(f"--topics must be in [1, {len(names)}]", file=sys.stderr)
        return EXIT_CONFIG
    topics = [
        TopicSpec(names[i], args.chunks_per_topic, args.vocab_size, args.chunk_words)
        for i in range(args.topics)
    ]
    groups = [
        QuestionGroup(i, args.questions_per_topic, args.question_words)
        for i in range(args.topics)
        if args.questions_per_topic > 0
    ]
    if args.off_topic_questions > 0:
        groups.append(QuestionGroup(None, args.off_topic_questions, args.question_words))
    corpus = generate_corpus(SyntheticSpec(topics=topics, questions=groups, seed=args.seed))
    docs_dir, questions_path = write_corpus(corpus, args.out_dir)
    print(f"wrote {len(corpus.documents)} documents to {docs_dir}")
    print(f"wrote {len(corpus.questions)} questions to {questions_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args)
        cfg = _config_from_args(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        return cmd_analyze(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except RagcovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
