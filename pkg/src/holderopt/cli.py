"""Command-line entry point for single runs and multi-algorithm comparisons.

Examples:

    holderopt --problem sqrt --algo backtrack_holder --out runs
    holderopt --config exp.cfg --seed 7 --out runs
    holderopt --problem sinkhorn_gan --algo "constant:0.05,nonmonotone_holder" --out runs

With several comma-separated algorithms the runs share problem, seed, and
parameters, and a comparison SVG is written next to the per-run CSVs.
"""

from __future__ import annotations

import argparse
import os
import sys

from .descent import NumericError
from .harness import (
    ExperimentConfig,
    compare_and_plot,
    config_from_values,
    load_config,
    objective_series,
    replace_config,
    run_experiment,
)
from .sinkhorn import SinkhornError


def _summary(run_id: str, traj) -> str:
    calls, values = objective_series(traj)
    return (
        f"{run_id}: status={traj.terminal_status} iterations={traj.records[-1].n} "
        f"oracle_calls={int(calls[-1])} objective={values[-1]:.6g}"
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="holderopt",
        description="Run backtracking-descent experiments and write CSV/SVG outputs.",
    )
    parser.add_argument("--config", metavar="PATH", help="flat key = value config file")
    parser.add_argument("--out", metavar="DIR", default="runs", help="output directory (default: runs)")
    parser.add_argument("--seed", metavar="U64", type=int, help="override the seed")
    parser.add_argument(
        "--algo",
        metavar="NAME",
        help="algorithm, or comma-separated list for a comparison plot "
        "(constant takes an optional step as constant:0.05)",
    )
    parser.add_argument("--problem", metavar="ID", help="problem id (e.g. sqrt, quadratic_saddle:8, sinkhorn_gan)")
    args = parser.parse_args(argv)

    try:
        overrides = {"seed": args.seed, "problem": args.problem}
        if args.config:
            config = load_config(args.config, **overrides)
        else:
            config = config_from_values({k: v for k, v in overrides.items() if v is not None})
        algos = [a.strip() for a in args.algo.split(",") if a.strip()] if args.algo else [config.algorithm]
        if not algos:
            raise ValueError("--algo must name at least one algorithm")

        if len(algos) == 1:
            config = replace_config(config, algorithm=algos[0])
            traj = run_experiment(config, out_dir=args.out)
            print(_summary(config.run_id(), traj))
        else:
            configs = [replace_config(config, algorithm=a) for a in algos]
            svg_path = os.path.join(args.out, "comparison.svg")
            results = compare_and_plot(configs, svg_path, out_dir=args.out)
            for run_id, traj in results:
                print(_summary(run_id, traj))
            print(f"wrote {svg_path}")
    except (ValueError, KeyError, OSError, NumericError, SinkhornError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
