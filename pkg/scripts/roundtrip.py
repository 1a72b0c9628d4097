"""Spectral data -> reconstruction -> distance, over a range of fit sizes."""

import argparse
from dataclasses import dataclass

from asymspec import Potential, verify_roundtrip


@dataclass
class Config:
    modes: int = 4
    fits: tuple = (12, 16, 24, 32)


def run(cfg):
    q = Potential.fourier(0.5, (0.3,), (0.4,))
    print(f"{'n_fit':>6} {'iters':>6} {'L2 distance':>12} {'converged':>10}")
    for n_fit in cfg.fits:
        if n_fit < 2 * cfg.modes + 1:
            continue
        rt = verify_roundtrip(q, n_fit, cfg.modes)
        print(f"{n_fit:>6} {rt.report.iterations:>6} {rt.distance:>12.3e} {str(rt.report.converged):>10}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", type=int, default=Config.modes)
    ap.add_argument("--fits", type=int, nargs="+", default=list(Config.fits))
    a = ap.parse_args()
    run(Config(a.modes, tuple(a.fits)))
