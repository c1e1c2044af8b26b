"""Run the two-variable grid certificate at several resolutions and summarize.

    python3 scripts/lemma1_certificate.py --grids 20x20x10 50x50x20 100x100x40
"""
import argparse
import time

from boolcube import bounds


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grids", nargs="+", default=["20x20x10", "50x50x20", "100x100x40"])
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    print(f"{'grid':>12} {'cells':>6} {'evals':>8} {'min phi':>11} {'argmin (rho, alpha, beta)':>36} "
          f"{'gram margin':>11} {'branches':>24} {'sec':>6}")
    for text in args.grids:
        grid = bounds.GridSpec.parse(text)
        start = time.perf_counter()
        report = bounds.verify_lemma1(grid, workers=args.workers)
        elapsed = time.perf_counter() - start
        argmin = ", ".join(f"{v:.4f}" for v in report.argmin)
        branches = " ".join(f"{k}={v}" for k, v in sorted(report.branches.items()))
        status = "" if report.passed else "  FAILED"
        print(f"{text:>12} {report.cells:>6} {report.evaluations:>8} {report.min_phi:>11.3e} "
              f"{argmin:>36} {report.min_gram_margin:>11.3e} {branches:>24} {elapsed:>6.1f}{status}")


if __name__ == "__main__":
    main()
