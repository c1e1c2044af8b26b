"""Tabulate gamma(x) = psi(1/2, x) and its slope, and locate the stationary point.

    python3 scripts/gamma_profile.py --points 20
"""
import argparse
import math

import numpy as np

from boolcube import bounds


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=20)
    args = parser.parse_args()

    for x in np.linspace(0, 1, args.points + 1)[:-1]:
        print(f"x={x:.4f}  gamma={bounds.gamma_fn(x):.10f}  gamma'={bounds.gamma_prime(x):+.3e}")
    lo, hi = 0.5, 0.8
    while hi - lo > 1e-15:
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if bounds.gamma_prime(mid) > 0 else (lo, mid)
    print(f"stationary point x* = {lo:.15f}, gamma(x*) = {bounds.gamma_fn(lo):.15f}, "
          f"log2(27/25) = {math.log2(27 / 25):.15f}")


if __name__ == "__main__":
    main()
