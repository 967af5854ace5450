#!/usr/bin/env python3
"""Run the rank-sweep reconstruction benchmark and write the CSV table.

Example:
    python3 scripts/run_benchmark.py --ranks 1.9,2.2,2.6 --runs 50 --out table.csv
"""

import argparse
import sys
import time

from driftwin import benchmark


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ranks", default="1.0,1.4,1.9,2.2,2.6",
                        help="comma-separated windows-per-atom targets")
    parser.add_argument("--runs", type=int, default=10,
                        help="instances per rank")
    parser.add_argument("--m", type=int, default=5,
                        help="number of data categories")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--solvers", default="cd,nelder-mead",
                        help="comma-separated subset of: cd, nelder-mead")
    parser.add_argument("--out", default="table.csv")
    args = parser.parse_args(argv)

    ranks = tuple(float(r) for r in args.ranks.split(","))
    solvers = tuple(s.strip() for s in args.solvers.split(","))
    started = time.perf_counter()
    rows = benchmark.run_benchmark(
        ranks=ranks, runs=args.runs, m=args.m, seed=args.seed, solvers=solvers
    )
    table = benchmark.aggregate_table(rows)
    with open(args.out, "w") as fh:
        fh.write(table)
    print(table, end="")
    print(f"# {len(rows)} rows in {time.perf_counter() - started:.1f}s "
          f"-> {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
