#!/usr/bin/env python3
"""Run every randomized check suite and print one JSON report.

Exit status is 0 only if every property in every suite passed. Use
--trials to scale the workload up or down uniformly.
"""

import argparse
import json
import sys

from gausscond.checks import DEFAULT_TRIALS, run_suite


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--suite",
        default="all",
        choices=["all", *sorted(DEFAULT_TRIALS)],
        help="which suite to run (default: all)",
    )
    parser.add_argument(
        "--trials", type=int, default=None, help="trials per suite (default: per-suite)"
    )
    parser.add_argument("--seed", type=int, default=0, help="base seed (default: 0)")
    parser.add_argument(
        "--rank-tol-scale",
        type=float,
        default=None,
        help="rank cutoff scale threaded through every operation",
    )
    args = parser.parse_args(argv)

    reports = run_suite(
        args.suite, trials=args.trials, seed=args.seed, rank_tol_scale=args.rank_tol_scale
    )
    payload = {
        "all_passed": all(r.all_passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    json.dump(payload, sys.stdout, indent=2)
    print()
    return 0 if payload["all_passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
