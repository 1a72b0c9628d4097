"""Rebuild a(.; q) from its samples on the Dirichlet spectrum of another potential.

Samples a(mu_j(p); q) for p = 0 and q(x) = x, then reports the worst error
and the smallest reported tail bound over a set of off-node lam for each
truncation J.
"""

import argparse
import math
from dataclasses import dataclass

import numpy as np

from asymspec import Potential, asym_eval, interpolate
from asymspec.propagator import spectral_steps
from asymspec.sampling import SampledEntireFunction, sample_on_spectrum


@dataclass
class Config:
    count: int = 512
    truncations: tuple = (16, 32, 64, 128, 256)


def run(cfg):
    q = Potential.grid([0.0, 1.0])
    steps = spectral_steps(cfg.count)
    base, s1 = sample_on_spectrum(Potential.zero(), lambda lam: asym_eval(q, lam, steps), cfg.count, steps=steps)
    lam = (np.arange(1, 17) + 0.5) ** 2 * math.pi**2
    direct = asym_eval(q, lam, steps)
    print(f"{'J':>5} {'max error':>12} {'min tail':>12} {'bound holds':>12}")
    for J in cfg.truncations:
        res = interpolate(SampledEntireFunction(base.nodes, base.weights, base.samples, J), s1, lam)
        err = np.abs(res.value - direct)
        print(f"{J:>5} {err.max():>12.3e} {res.tail.min():>12.3e} {str(bool(np.all(err <= res.tail))):>12}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=Config.count)
    ap.add_argument("--J", type=int, nargs="+", default=list(Config.truncations))
    a = ap.parse_args()
    run(Config(a.count, tuple(a.J)))
