"""The asymmetry function a(lam; q) = (c(1, lam) - s'(1, lam)) / 2 and the DtN map."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InconsistencyError, PoleError
from .potential import cell_averages, evaluate, odd_part, reflect
from .propagator import default_steps, fundamental, trajectory


def asym_eval(q, lam, steps=None):
    """a(lam; q) for scalar or array ``lam``."""
    return fundamental(q, lam, steps).asymmetry


def _breakpoints(q):
    if q.basis == "grid":
        return np.linspace(0.0, 1.0, len(q.grid_values))
    if q.basis == "piecewise":
        return np.linspace(0.0, 1.0, len(q.grid_values) + 1)
    return np.array([0.0, 1.0])


def leading_by_quadrature(q, n, nodes=12):
    """Same as :func:`asym_leading` but always by panel Gauss-Legendre."""
    qo = odd_part(q)
    edges = _breakpoints(q)
    per = max(1, math.ceil(4 * n / (len(edges) - 1)))
    panels = np.concatenate([np.linspace(a, b, per + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])] + [[1.0]])
    t, w = np.polynomial.legendre.leggauss(nodes)
    a, b = panels[:-1, None], panels[1:, None]
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    vals = np.asarray(evaluate(qo, np.clip(x, 0.0, 1.0))) * np.sin(2 * np.pi * n * x)
    integral = float(np.sum(0.5 * (b - a) * w * vals))
    return -((-1) ** n) * integral / (2 * n * math.pi)


def asym_leading(q, n):
    """Leading term of a(mu_n; q): -1/(4 n pi) * int_{-1}^{1} sin(n pi y) q_o((y+1)/2) dy."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if q.basis == "fourier":
        if n > len(q.sin_coeffs):
            return 0.0
        return -((-1) ** n) * q.sin_coeffs[n - 1] / (4 * n * math.pi)
    return leading_by_quadrature(q, n)


@dataclass(frozen=True)
class DtNMatrix:
    lam: complex
    entries: np.ndarray


def _pole_scale(lam):
    return 1e-8 * (1.0 + abs(lam)) ** -0.5


def dtn(q, lam, steps=None):
    """N(lam; q) = (1/s) [[-c, 1], [1, -s']], mapping (u(0), u(1)) to (u'(0), -u'(1))."""
    f = fundamental(q, lam, steps)
    if abs(f.s1) <= _pole_scale(lam):
        nearest = lam - f.s1 / f.s1_dl
        raise PoleError(f"lam = {lam} is within the pole guard of eigenvalue {nearest}", nearest=nearest)
    n = np.array([[-f.c1, 1.0], [1.0, -f.ds1]]) / f.s1
    # test solution u = c + s
    u0, u1 = 1.0, f.c1 + f.s1
    du0, du1 = 1.0, f.dc1 + f.ds1
    got = n @ np.array([u0, u1])
    want = np.array([du0, -du1])
    if np.max(np.abs(got - want)) > 1e-8 * max(1.0, np.max(np.abs(want)), np.max(np.abs(n))):
        raise InconsistencyError(f"DtN map fails its defining identity at lam = {lam}")
    return DtNMatrix(lam=lam, entries=n)


class CommutatorResult(NamedTuple):
    norm: float
    skipped: tuple


def default_commutator_grid(count=32):
    """Midpoints between consecutive integer multiples of pi^2."""
    return (np.arange(count) + 0.5) * math.pi**2


def dtn_commutator_norm(q1, q2, lambda_grid=None, steps=None):
    """max over the grid of ||N1 N2 - N2 N1||_F; points at poles are skipped and reported."""
    grid = default_commutator_grid() if lambda_grid is None else np.asarray(lambda_grid)
    best = 0.0
    skipped = []
    for lam in grid:
        try:
            n1 = dtn(q1, lam, steps).entries
            n2 = dtn(q2, lam, steps).entries
        except PoleError:
            skipped.append(float(lam))
            continue
        best = max(best, float(np.linalg.norm(n1 @ n2 - n2 @ n1)))
    return CommutatorResult(best, tuple(skipped))


def odd_identity_residual(q, lam, steps=None):
    """|c'(1) a(lam) + int_0^1 q_o c(x; q) c(x; q~) dx|.

    The integral is the trapezoid rule on the propagator grid with the odd
    part of the cell-averaged potential, so the residual is O(h^2).
    """
    if steps is None:
        steps = default_steps(lam)
    qt = reflect(q)
    _, c, dc = trajectory(q, lam, steps, init=(1.0, 0.0))
    _, ct, _ = trajectory(qt, lam, steps, init=(1.0, 0.0))
    qbar = cell_averages(q, steps)
    qo = 0.5 * (qbar - cell_averages(qt, steps))
    g = c * ct
    h = 1.0 / steps
    integral = np.sum(qo * 0.5 * h * (g[:-1] + g[1:]))
    a = 0.5 * (c[-1] - fundamental(q, lam, steps).ds1)
    return float(abs(dc[-1] * a + integral))


def symmetry_grid(grid_size):
    return np.concatenate([np.arange(grid_size + 1) * math.pi**2, -np.arange(1, 9) * math.pi**2 / 2])


def symmetry_test(q, grid_size=16, steps=None):
    """(max|a| < 1e-8, max|a|) on {0, pi^2, ..., grid_size pi^2} plus 8 negative points."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    lams = symmetry_grid(grid_size)
    worst = float(np.max(np.abs(asym_eval(q, lams, steps))))
    return worst < 1e-8, worst


@dataclass(frozen=True)
class AsymmetrySamples:
    lambdas: np.ndarray
    values: np.ndarray
    source_potential_id: str = ""

    def __post_init__(self):
        if len(self.lambdas) != len(self.values):
            raise ValueError("lambdas and values must have equal lengths")


def sample_asymmetry(q, lambdas, steps=None, source_id=""):
    lambdas = np.asarray(lambdas)
    return AsymmetrySamples(lambdas, np.asarray(asym_eval(q, lambdas, steps)), source_id)


def asym_csv(samples):
    """CSV text with header ``lambda,a_re,a_im`` and LF line endings."""
    buf = io.StringIO()
    buf.write("lambda,a_re,a_im\n")
    for lam, v in zip(samples.lambdas, samples.values):
        v = complex(v)
        buf.write(f"{float(np.real(lam))!r},{v.real!r},{v.imag!r}\n")
    return buf.getvalue()
