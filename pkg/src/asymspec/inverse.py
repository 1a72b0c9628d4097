"""Potentials from Dirichlet spectra and asymmetry samples.

The unknown is a truncated Fourier potential (mean, cos_1..m, sin_1..m).
A damped Gauss-Newton (Levenberg-Marquardt) iteration drives the weighted
residual ((mu_n - mu_n*) / n, n (alpha_n - alpha_n*)), n <= n_fit, to zero.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AsymspecError, DomainError
from .potential import Potential, l2_distance, to_dict
from .propagator import fundamental, spectral_steps
from .spectrum import dirichlet_eigenvalues, estimate_mean, spectral_triple

PI2 = math.pi**2


def thread_count():
    """Worker threads from ASYMSPEC_THREADS: unset means 1, 0 means one per CPU."""
    raw = os.environ.get("ASYMSPEC_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


@dataclass(frozen=True)
class ReconstructionTarget:
    mu: np.ndarray
    alpha: np.ndarray
    n_fit: int
    steps: int = 0

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        alpha = np.asarray(self.alpha, dtype=float)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "alpha", alpha)
        if self.n_fit < 2:
            raise DomainError("n_fit must be at least 2")
        if len(mu) < self.n_fit or len(alpha) < self.n_fit:
            raise DomainError("mu and alpha need at least n_fit entries")
        if np.any(np.diff(mu) <= 0):
            raise DomainError("target eigenvalues must be strictly increasing")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(alpha))):
            raise DomainError("target data must be finite")
        if not self.steps:
            object.__setattr__(self, "steps", spectral_steps(self.n_fit))

    @classmethod
    def from_potential(cls, q, n_fit, steps=None):
        t = spectral_triple(q, max(n_fit, 4), steps)
        return cls(t.mu[:n_fit], t.alpha[:n_fit], n_fit, t.steps)


@dataclass(frozen=True)
class ReconstructionReport:
    recovered: Potential
    iterations: int
    residual_history: list
    final_mu_residual: float
    final_alpha_residual: float
    converged: bool
    n_modes: int = 0
    n_fit: int = 0
    tol: float = 0.0
    steps: int = 0
    message: str = ""

    def to_dict(self):
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residuals": list(self.residual_history),
            "final_mu_residual": self.final_mu_residual,
            "final_alpha_residual": self.final_alpha_residual,
            "message": self.message,
            "recovered": to_dict(self.recovered),
            "meta": {"n_modes": self.n_modes, "n_fit": self.n_fit, "tol": self.tol, "steps": self.steps},
        }


def _potential(params, m):
    return Potential.fourier(params[0], params[1:m + 1], params[m + 1:2 * m + 1])


def _params(q, m):
    cos, sin = q.padded(m)
    return np.concatenate([[q.mean], cos, sin])


class _ForwardMap:
    """mu_1..n_fit and alpha_1..n_fit of a Fourier potential, warm-started."""

    def __init__(self, target, m):
        self.target = target
        self.m = m
        self.n = np.arange(1, target.n_fit + 1)
        self.guess = target.mu[: target.n_fit]

    def spectra(self, params):
        q = _potential(params, self.m)
        steps = self.target.steps
        mu = dirichlet_eigenvalues(q, self.target.n_fit, steps, guess=self.guess)
        return mu, fundamental(q, mu, steps).asymmetry

    def residual(self, params):
        mu, alpha = self.spectra(params)
        t = self.target
        k = t.n_fit
        return np.concatenate([(mu - t.mu[:k]) / self.n, self.n * (alpha - t.alpha[:k])])

    def split(self, r):
        k = self.target.n_fit
        return float(np.max(np.abs(r[:k]))), float(np.max(np.abs(r[k:])))


@lru_cache(maxsize=None)
def eigenvalue_gain(eps=1e-3):
    """d mu_1 / d A_1 for q = A_1 cos(2 pi x), measured on the forward map (about -1/2)."""
    steps = spectral_steps(8)
    base = dirichlet_eigenvalues(Potential.zero(), 1, steps)[0]
    mu = dirichlet_eigenvalues(Potential.fourier(0.0, (eps,)), 1, steps)[0]
    return float((mu - base) / eps)


def initial_guess(target, n_modes=None):
    """First-order Fourier inversion of the target.

    mean from the tail average of mu_n - pi^2 n^2; cosine coefficients from
    sigma_n / gain with the calibrated gain; sine coefficients from the
    leading asymmetry term, sin_n = -4 n pi (-1)^n alpha_n.
    """
    if target.n_fit < 2:
        raise DomainError("n_fit must be at least 2")
    k = target.n_fit
    m = (k - 1) // 2 if n_modes is None else n_modes
    m = min(m, k)
    n = np.arange(1, k + 1)
    mu = target.mu[:k]
    mean = estimate_mean(mu) if k >= 8 else float(np.mean(mu - PI2 * n**2))
    sigma = mu - PI2 * n**2 - mean
    cos = sigma[:m] / eigenvalue_gain()
    sign = np.where(n[:m] % 2 == 0, 1.0, -1.0)
    sin = -4 * n[:m] * math.pi * sign * target.alpha[:m]
    return Potential.fourier(mean, cos, sin)


def _jacobian(fwd, params, r0, pool):
    def column(i):
        h = 1e-6 * (1.0 + abs(params[i]))
        p = params.copy()
        p[i] += h
        return (fwd.residual(p) - r0) / h

    idx = range(len(params))
    cols = list(pool.map(column, idx)) if pool else [column(i) for i in idx]
    return np.column_stack(cols)


def reconstruct(target, n_modes, tol=1e-8, max_iter=50, start=None):
    """Levenberg-Marquardt on the truncated Fourier parameters.

    A step is accepted only if it lowers ||r||_2, so ``residual_history`` is
    non-increasing.  Convergence means ||r||_inf < tol; running out of
    iterations returns ``converged=False``.
    """
    if n_modes < 0:
        raise DomainError("n_modes must be non-negative")
    if target.n_fit < 2 * n_modes + 1:
        raise DomainError("n_fit must be at least 2 n_modes + 1")
    m = n_modes
    fwd = _ForwardMap(target, m)
    params = _params(start or initial_guess(target, m), m)
    r = fwd.residual(params)
    cost = float(r @ r)
    history = [math.sqrt(cost)]
    damping = None
    iterations = 0
    message = "max_iter reached"
    workers = thread_count()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while True:
            if np.max(np.abs(r)) < tol:
                message = "converged"
                break
            if iterations >= max_iter:
                break
            iterations += 1
            jac = _jacobian(fwd, params, r, pool)
            jtj = jac.T @ jac
            grad = jac.T @ r
            diag = np.maximum(np.diag(jtj), 1e-12 * max(1.0, np.max(np.diag(jtj))))
            if damping is None:
                damping = 1e-3
            accepted = False
            for _ in range(30):
                step = np.linalg.solve(jtj + damping * np.diag(diag), -grad)
                trial = params + step
                try:
                    r_new = fwd.residual(trial)
                except AsymspecError:
                    damping *= 4.0
                    continue
                new_cost = float(r_new @ r_new)
                if new_cost < cost:
                    params, r, cost = trial, r_new, new_cost
                    damping = max(damping / 3.0, 1e-12)
                    accepted = True
                    break
                damping *= 4.0
            if not accepted:
                message = "no decreasing step found"
                break
            history.append(math.sqrt(cost))
    finally:
        if pool:
            pool.shutdown()
    mu_res, alpha_res = fwd.split(r)
    return ReconstructionReport(
        recovered=_potential(params, m), iterations=iterations, residual_history=history,
        final_mu_residual=mu_res, final_alpha_residual=alpha_res,
        converged=bool(max(mu_res, alpha_res) < tol), n_modes=m, n_fit=target.n_fit,
        tol=tol, steps=target.steps, message=message,
    )


def isospectral_partner(p, new_alpha, n_modes, n_fit=None, tol=1e-8, max_iter=50, steps=None):
    """Reconstruct against (mu(p), new_alpha): same spectrum, new asymmetry data."""
    new_alpha = np.asarray(new_alpha, dtype=float)
    n_fit = n_fit or len(new_alpha)
    steps = steps or spectral_steps(n_fit)
    mu = dirichlet_eigenvalues(p, n_fit, steps)
    target = ReconstructionTarget(mu, new_alpha[:n_fit], n_fit, steps)
    return reconstruct(target, n_modes, tol, max_iter)


@dataclass(frozen=True)
class RoundTrip:
    distance: float
    passed: bool
    report: ReconstructionReport = field(repr=False)


def verify_roundtrip(q, n_fit, n_modes, tol=1e-8, threshold=1e-4):
    """spectral_triple -> reconstruct -> L2 distance to ``q``; passes below ``threshold``."""
    if q.basis != "fourier" or q.n_modes > n_modes:
        raise DomainError("round trips need a Fourier potential with at most n_modes modes")
    target = ReconstructionTarget.from_potential(q, n_fit)
    report = reconstruct(target, n_modes, tol)
    d = l2_distance(report.recovered, q)
    return RoundTrip(d, d < threshold, report)
