"""Command line entry point: ``ptrclones detect|verify|loop``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .pipeline import (
    CorpusUnreadable,
    EmptyCorpus,
    InvariantViolation,
    RunConfig,
    run_detect,
    run_loop_cmd,
    run_verify,
)

EXIT_OK, EXIT_USAGE, EXIT_CORPUS, EXIT_INVARIANT = 0, 1, 2, 3
SEED_ENV = "TWINFINDER_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _delta(text: str):
    if text == "random":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number or 'random'")
    if not value > 1.0:
        raise argparse.ArgumentTypeError("delta must exceed 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", required=True, help="directory of preprocessed C files")
    common.add_argument("--similarity", type=float, default=0.8)
    common.add_argument("--delta", type=_delta, default=2.0, help="weight > 1 or 'random'")
    common.add_argument("--max-iters", type=int, default=10)
    common.add_argument("--min-size", type=int, default=10)
    common.add_argument("--preset", choices=("paper9", "full"), default="full")
    common.add_argument("--mode", choices=("exact", "lsh"), default="exact")
    common.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    common.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--dump-slices", default=None, help="write each fragment as <id>.c / <id>.lines")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = _Parser(prog="ptrclones", description="Pointer-related clone detection with verification feedback.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("detect", parents=[common], help="slice, vectorize and cluster")
    sub.add_parser("verify", parents=[common], help="detect, then verify sampled pairs")
    sub.add_parser("loop", parents=[common], help="detect, verify and run the feedback loop")
    return parser


def _seed(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"{SEED_ENV} must be an integer, got {env!r}")


def _summary(report: dict) -> str:
    lines = []
    for b in report["benchmarks"]:
        loc = b["loc"]
        line = (f"{b['name']}: {b['fragment_count']} fragments, {b['cluster_count']} clusters, "
                f"{b['clone_pairs']} clone pairs; LoC {loc['cloned']}/{loc['pointer_related']}/{loc['program']}")
        if "feedback" in b:
            fb = b["feedback"]
            line += (f"; FP {fb['fp_eliminated']}/{fb['fp_seen']} eliminated, "
                     f"converged at {fb['convergence_iteration']}")
        elif "verdict_counts" in b:
            vc = b["verdict_counts"]
            line += f"; {vc['equivalent']} equivalent, {vc['different']} different, {vc['unknown']} unknown"
        lines.append(line)
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        seed = _seed(args.seed)
    except SystemExit as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        config = RunConfig(args.corpus, args.similarity, args.delta, args.max_iters, args.min_size,
                           args.preset, args.mode, seed, args.report, args.dump_slices)
    except CorpusUnreadable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run = {"detect": run_detect, "verify": run_verify, "loop": run_loop_cmd}[args.command]
    try:
        report = run(config)
    except (EmptyCorpus, CorpusUnreadable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORPUS
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if args.report:
        print(_summary(report))
    else:
        print(json.dumps(report, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
