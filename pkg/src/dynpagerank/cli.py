"""Command-line entry point: ``dynpagerank {static,temporal,random} ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from .engines import APPROACHES
from .errors import InputError
from .harness import ExperimentConfig, emit_report, run_experiment
from .partition import DEFAULT_LOW_DEGREE_THRESHOLD
from .ranks import EngineConfig, PartitionStrategy


def _csv_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", action="append", required=True,
                        help="dataset path (.mtx, or 'src dst timestamp' edge list); repeatable")
    common.add_argument("--approaches", type=_csv_list, default=list(APPROACHES),
                        help="comma list from static,nd,dt,df,dfp (default: all)")
    common.add_argument("--batch-sizes", type=_csv_list, default=["1e-3"],
                        help="comma list of batch sizes as fractions of |E_T| or |E|")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--reps", type=int, default=1, help="batches per size (random mode)")
    common.add_argument("--batch-count", type=int, default=100, help="consecutive batches (temporal mode)")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--partition-strategy", choices=[s.value for s in PartitionStrategy],
                        default=PartitionStrategy.PARTITION_BOTH.value)
    common.add_argument("--dp-threshold", type=int, default=DEFAULT_LOW_DEGREE_THRESHOLD,
                        help="largest degree treated as low-degree")
    common.add_argument("--alpha", type=float, default=0.85)
    common.add_argument("--tol", type=float, default=1e-10, help="L-inf iteration tolerance")
    common.add_argument("--frontier-tol", type=float, default=1e-6)
    common.add_argument("--prune-tol", type=float, default=1e-6)
    common.add_argument("--max-iters", type=int, default=500)
    common.add_argument("--chain", choices=["per-approach", "shared-reference"], default="per-approach",
                        help="where dynamic approaches take their previous ranks from")
    common.add_argument("--out", required=True, help="report path")
    common.add_argument("--format", choices=["csv", "json"], default=None,
                        help="report format (default: from --out suffix, else csv)")
    common.add_argument("--deterministic", action="store_true",
                        help="write runtime as 0 so reruns give byte-identical reports")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="dynpagerank", description="Dynamic PageRank benchmark harness")
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("static", parents=[common], help="static PageRank on each graph")
    sub.add_parser("temporal", parents=[common], help="consecutive insertion batches from a temporal graph")
    sub.add_parser("random", parents=[common], help="random 80/20 insert/delete batches on a static graph")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
    try:
        if args.threads is not None:
            import numba

            numba.set_num_threads(args.threads)
        engine = EngineConfig(
            damping=args.alpha,
            tolerance=args.tol,
            frontier_tolerance=args.frontier_tol,
            prune_tolerance=args.prune_tol,
            max_iterations=args.max_iters,
            low_degree_threshold=args.dp_threshold,
            partition_strategy=args.partition_strategy,
        )
        config = ExperimentConfig(
            graphs=args.graph,
            mode=args.mode,
            batch_sizes=args.batch_sizes,
            approaches=args.approaches,
            seed=args.seed,
            reps=args.reps,
            engine=engine,
            batch_count=args.batch_count,
            chain=args.chain,
            mask_timing=args.deterministic,
        )
        rows = run_experiment(config)
        emit_report(rows, fmt, args.out)
    except (InputError, OSError, ValueError) as exc:
        print(f"dynpagerank: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
