"""Dirichlet eigenvalues, norming constants and the spectral data triple."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, FormatError, InconsistencyError
from .potential import integral
from .propagator import fundamental, prufer_count, spectral_steps, trajectory

PI2 = math.pi**2


def _bracket(q, n, guess, steps):
    """Brackets (lo, hi] each holding exactly the n-th eigenvalue."""
    width = PI2 * n
    lo, hi = guess - width, guess + width
    target = n - 1
    for _ in range(64):
        counts = prufer_count(q, np.concatenate([lo, hi]), steps)
        cl, ch = counts[: len(n)], counts[len(n):]
        bad_lo, bad_hi = cl > target, ch < n
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
        width = np.where(bad_lo | bad_hi, 2 * width, width)
    else:
        idx = int(n[np.argmax(bad_lo | bad_hi)])
        raise ConvergenceError(f"eigenvalue bracket failed for index {idx}", index=idx)
    # bisect on the count until the bracket isolates mu_n
    for _ in range(200):
        loose = (cl < target) | (ch > n)
        if not loose.any():
            return lo, hi
        mid = 0.5 * (lo + hi)
        cm = prufer_count(q, mid[loose], steps)
        m = np.zeros_like(cl)
        m[loose] = cm
        upper = loose & (m >= n)
        lower = loose & (m < n)
        hi = np.where(upper, mid, hi)
        ch = np.where(upper, m, ch)
        lo = np.where(lower, mid, lo)
        cl = np.where(lower, m, cl)
    idx = int(n[np.argmax(loose)])
    raise ConvergenceError(f"could not isolate eigenvalue {idx}", index=idx)


def _newton(q, n, lo, hi, x, steps, max_iter=100):
    # safeguarded Newton on s(1, .) inside isolating brackets; s(1, .) has sign
    # (-1)**(n-1) just below mu_n
    sign_lo = np.where(n % 2 == 1, 1.0, -1.0)
    x = np.where((x > lo) & (x < hi), x, 0.5 * (lo + hi))
    active = np.ones(len(n), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if not len(idx):
            return x
        f = fundamental(q, x[idx], steps)
        s, sd = np.atleast_1d(f.s1), np.atleast_1d(f.s1_dl)
        xi, loi, hii = x[idx], lo[idx], hi[idx]
        below = s * sign_lo[idx] > 0
        loi = np.where(below, xi, loi)
        hii = np.where(below, hii, xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = -s / sd
        new = xi + step
        ok = np.isfinite(new) & (new > loi) & (new < hii)
        new = np.where(ok, new, 0.5 * (loi + hii))
        scale = np.maximum(1.0, np.abs(xi))
        done = (s == 0) | (ok & (np.abs(step) <= 1e-14 * scale)) | (hii - loi <= 4e-16 * scale)
        x[idx] = np.where(s == 0, xi, new)
        lo[idx], hi[idx] = loi, hii
        active[idx[done]] = False
    idx = int(n[np.argmax(active)])
    raise ConvergenceError(f"Newton iteration failed for eigenvalue {idx}", index=idx)


def dirichlet_eigenvalues(q, n_max, steps=None, guess=None):
    """First ``n_max`` Dirichlet eigenvalues of -d2/dx2 + q on [0, 1].

    Each eigenvalue is isolated by Pruefer counts and polished by Newton's
    method with the analytic lam-derivative of s(1, lam).
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if steps is None:
        steps = spectral_steps(n_max)
    n = np.arange(1, n_max + 1)
    if guess is None:
        guess = PI2 * n**2 + integral(q)
    guess = np.asarray(guess, dtype=float)[:n_max]
    lo, hi = _bracket(q, n, guess.copy(), steps)
    mu = _newton(q, n, lo, hi, guess.copy(), steps)
    f = fundamental(q, mu, steps)
    bad = np.abs(f.s1) > 1e-12 * np.maximum(1.0, np.abs(f.s1_dl))
    if bad.any():
        idx = int(n[np.argmax(bad)])
        raise ConvergenceError(f"residual too large at eigenvalue {idx}", index=idx)
    return mu


def certify(q, mu, steps=None):
    """True where prufer counts just below/above mu_n are n-1 and n."""
    mu = np.asarray(mu, dtype=float)
    if steps is None:
        steps = spectral_steps(len(mu))
    n = np.arange(1, len(mu) + 1)
    eps = 1e-6 * np.maximum(1.0, np.abs(mu))
    counts = prufer_count(q, np.concatenate([mu - eps, mu + eps]), steps)
    return (counts[: len(mu)] == n - 1) & (counts[len(mu):] == n)


def norming_constants(q, mu, steps=None, check=True):
    """l_j^2 = int_0^1 s(x, mu_j)^2 dx, returned from s'(1, mu_j) * sdot(1, mu_j).

    With ``check`` the value is compared with an exact cell-by-cell
    quadrature of s(x, mu_j)^2; a relative mismatch beyond 1e-4 means ``mu``
    were not eigenvalues of ``q``.
    """
    mu = np.asarray(mu, dtype=float)
    if steps is None:
        steps = spectral_steps(len(mu))
    f = fundamental(q, mu, steps)
    norming = np.atleast_1d(f.ds1 * f.s1_dl)
    if check:
        _, _, _, cells = trajectory(q, mu.reshape(-1), steps, init=(0.0, 1.0), cell_l2=True)
        quad = np.atleast_2d(cells).sum(axis=1)
        rel = np.abs(quad - norming) / np.abs(quad)
        if np.any(rel > 1e-4) or np.any(norming <= 0):
            j = int(np.argmax(rel)) + 1
            raise InconsistencyError(f"norming constant {j}: identity and quadrature disagree ({rel[j - 1]:.2e})")
    return norming


def estimate_mean(mu):
    """Tail average of mu_n - pi^2 n^2 over the last half of the sequence."""
    mu = np.asarray(mu, dtype=float)
    if len(mu) < 8:
        raise DomainError("estimate_mean needs at least 8 eigenvalues")
    n = np.arange(1, len(mu) + 1)
    half = len(mu) // 2
    return float(np.mean((mu - PI2 * n**2)[half:]))


@dataclass(frozen=True)
class SpectralTriple:
    c: float
    mu: np.ndarray
    sigma: np.ndarray
    kappa: np.ndarray
    alpha: np.ndarray
    norming: np.ndarray
    n_max: int
    steps: int = 0
    s_prime: np.ndarray = field(default=None, repr=False)
    s_dot: np.ndarray = field(default=None, repr=False)
    c_estimator: str = "tail-mean(last half)"

    def to_dict(self):
        return {
            "c": float(self.c),
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "kappa": self.kappa.tolist(),
            "alpha": self.alpha.tolist(),
            "norming": self.norming.tolist(),
            "meta": {"n_max": self.n_max, "steps": self.steps, "c_estimator": self.c_estimator},
        }


def spectral_triple(q, n_max, steps=None):
    """(c, sigma, kappa) together with mu, alpha and the norming constants."""
    if n_max < 4:
        raise DomainError("spectral_triple needs n_max >= 4")
    if steps is None:
        steps = spectral_steps(n_max)
    mu = dirichlet_eigenvalues(q, n_max, steps)
    f = fundamental(q, mu, steps)
    n = np.arange(1, n_max + 1)
    signed = np.where(n % 2 == 0, 1.0, -1.0) * f.ds1
    if np.any(signed <= 0):
        j = int(n[np.argmax(signed <= 0)])
        raise InconsistencyError(f"(-1)^n s'(1, mu_n) <= 0 at n = {j}")
    kappa = np.log(signed)
    alpha = np.where(n % 2 == 1, 1.0, -1.0) * np.sinh(kappa)
    direct = f.asymmetry
    if np.any(np.abs(direct - alpha) > 1e-8 * np.maximum(1.0, np.abs(alpha))):
        j = int(np.argmax(np.abs(direct - alpha))) + 1
        raise InconsistencyError(f"a(mu_n) and (-1)^(n+1) sinh(kappa_n) disagree at n = {j}")
    c = estimate_mean(mu) if n_max >= 8 else float(np.mean(mu - PI2 * n**2))
    return SpectralTriple(
        c=c, mu=mu, sigma=mu - PI2 * n**2 - c, kappa=kappa, alpha=alpha,
        norming=f.ds1 * f.s1_dl, n_max=n_max, steps=steps,
        s_prime=f.ds1, s_dot=f.s1_dl,
        c_estimator="tail-mean(last half)" if n_max >= 8 else "mean(all)",
    )


_SPECTRAL_KEYS = {"c", "mu", "sigma", "kappa", "alpha", "norming"}


def spectral_from_dict(d):
    """Parse the spectral data JSON object into plain arrays.

    Requires ``mu`` and ``alpha``; other keys optional except that unknown
    keys are rejected (``meta`` is allowed).
    """
    if not isinstance(d, dict):
        raise FormatError("spectral data must be a JSON object")
    extra = set(d) - _SPECTRAL_KEYS - {"meta"}
    if extra:
        raise FormatError(f"unknown spectral data fields: {sorted(extra)}")
    if "mu" not in d or "alpha" not in d:
        raise FormatError("spectral data needs 'mu' and 'alpha'")
    out = {}
    for key in _SPECTRAL_KEYS & set(d):
        val = d[key]
        if key == "c":
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise FormatError("'c' must be a number")
            out[key] = float(val)
            continue
        if not isinstance(val, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
            raise FormatError(f"'{key}' must be a list of numbers")
        out[key] = np.asarray(val, dtype=float)
    out["meta"] = d.get("meta", {})
    return out


def spectral_dumps(triple):
    return json.dumps(triple.to_dict())
