"""Smallest gap among non-dictator pairs per rho, for n = 2, 3 (and n = 4 by orbit).

Prints a table and optionally writes it as JSON.

    python3 scripts/measure_gap_margins.py --n 2 3 --out margins.json
"""
import argparse
import json

from boolcube import search
from boolcube.cli import parse_grid


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[2, 3])
    parser.add_argument("--rho-grid", default="0.05:0.95:0.05")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out")
    args = parser.parse_args()

    grid = parse_grid(args.rho_grid)
    results = {}
    for n in args.n:
        mode = "exhaustive" if n <= search.MODE_LIMITS["exhaustive"] else "canonical"
        report = search.verify_theorem(n, grid, mode=mode, workers=args.workers)
        results[n] = {
            "mode": mode,
            "pairs": report.pairs_scanned,
            "max_gap_violation": report.max_gap_violation,
            "min_nondictator_gap_by_rho": dict(zip(grid, report.min_nondictator_gap_by_rho)),
        }
        print(f"n={n} ({mode}, {report.pairs_scanned} pairs): {report.summary()}")
        for rho, margin in zip(grid, report.min_nondictator_gap_by_rho):
            print(f"  rho={rho:<5} min non-dictator gap = {margin:.6e}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(results, fh, indent=2)
            fh.write("\n")


if __name__ == "__main__":
    main()
