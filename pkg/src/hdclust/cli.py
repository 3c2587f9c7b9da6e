"""Command-line benchmark driver.

Example:

    hdclust --registry configs/datasets.ini --dataset iris \\
        --algorithm sb-affinity --encoding record --mode binary \\
        --seeds 0..99 --output iris_sbap.json --format json

Exit codes: 0 success, 1 configuration error, 2 dataset error, 3 completed
with some failed seeds (their records carry the error).
"""

from __future__ import annotations

import argparse
import sys

from .bench import Algorithm, ExperimentConfig, emit_report, run_experiment
from .classic import ApConfig
from .datasets import load, load_registry
from .encoding import EncodingKind
from .errors import ConfigError, HdclustError
from .hdc_clustering import RefinementConfig
from .hv import Mode

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATASET = 2
EXIT_PARTIAL = 3


def _parse_seed_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition("..")
        if hi == "":
            value = int(lo)
            return value, value
        return int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"cannot parse seed range {text!r}; expected A..B") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdclust",
        description="Run one clustering experiment over a range of seeds.",
    )
    parser.add_argument("--registry", required=True, help="dataset registry (INI) path")
    parser.add_argument("--dataset", required=True, help="dataset name from the registry")
    parser.add_argument(
        "--algorithm",
        required=True,
        choices=[a.value for a in Algorithm],
    )
    parser.add_argument(
        "--encoding", default="record", choices=[e.value for e in EncodingKind]
    )
    parser.add_argument("--mode", default="binary", choices=[m.value for m in Mode])
    parser.add_argument("--dim", type=int, default=10000)
    parser.add_argument("--q", type=int, default=16)
    parser.add_argument("--seeds", default="0..499", help="inclusive range A..B")
    parser.add_argument("--one-pass", action="store_true")
    parser.add_argument("--max-iters", type=int, default=300)
    parser.add_argument("--output", required=True, help="report file path")
    parser.add_argument("--format", default="json", choices=["csv", "json"])
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--ap-preference",
        type=float,
        default=None,
        help="affinity propagation preference (default: median similarity)",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = ExperimentConfig(
            dataset=args.dataset,
            algorithm=Algorithm(args.algorithm),
            encoding=EncodingKind(args.encoding),
            mode=Mode(args.mode),
            dim=args.dim,
            q=args.q,
            seeds=_parse_seed_range(args.seeds),
            refinement=RefinementConfig(
                max_iterations=args.max_iters, one_pass=args.one_pass
            ),
            ap=ApConfig(preference=args.ap_preference),
            threads=args.threads,
        )
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        registry = load_registry(args.registry)
        if args.dataset not in registry:
            print(
                f"dataset error: {args.dataset!r} not in registry "
                f"({', '.join(sorted(registry)) or 'empty'})",
                file=sys.stderr,
            )
            return EXIT_DATASET
        dataset = load(registry[args.dataset])
    except HdclustError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET

    report = run_experiment(config, dataset)
    try:
        emit_report(report, args.format, args.output)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    failed = report.failed_records
    ok = len(report.records) - len(failed)
    if "accuracy" in report.aggregates:
        acc = report.aggregates["accuracy"]
        print(
            f"{args.dataset}/{args.algorithm}: {ok}/{len(report.records)} runs, "
            f"accuracy {100 * acc.mean:.2f}% (std {100 * acc.std:.2f}), "
            f"report -> {args.output}"
        )
    if failed:
        print(f"{len(failed)} seed(s) failed; see their error entries", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
