"""Off-diagonal square sums of K(n, j) as N doubles.

Prints S(N) = sum_{n != j <= N} K(n, j)^2 for a constant c_n and the ratio
of successive increments.  For c_n = 1 the ratio approaches 2 from below.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from asymspec import k_bound_check


@dataclass
class Config:
    c: float = 1.0
    n_min: int = 16
    doublings: int = 5


def run(cfg):
    sizes = [cfg.n_min * 2**k for k in range(cfg.doublings)]
    sums = [k_bound_check(np.full(N, cfg.c), N)[1] for N in sizes]
    print(f"{'N':>6} {'S(N)':>12} {'increment':>12} {'ratio':>8}")
    prev_inc = None
    for i, (N, s) in enumerate(zip(sizes, sums)):
        inc = s - sums[i - 1] if i else float("nan")
        ratio = prev_inc / inc if prev_inc else float("nan")
        print(f"{N:>6} {s:>12.6f} {inc:>12.3e} {ratio:>8.4f}")
        prev_inc = inc if i else None
    return sizes, sums


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=Config.c)
    ap.add_argument("--n-min", type=int, default=Config.n_min)
    ap.add_argument("--doublings", type=int, default=Config.doublings)
    a = ap.parse_args()
    run(Config(a.c, a.n_min, a.doublings))
