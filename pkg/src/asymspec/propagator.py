"""Fundamental solutions of -u'' + q u = lam u on [0, 1].

The interval is cut into ``steps`` equal cells and q is frozen to its exact
cell average on each.  On a cell the 2x2 propagator acting on (u, u') is

    [[cos(w h),        sin(w h) / w],
     [-w sin(w h),     cos(w h)    ]],      w**2 = lam - qbar,

whose entries are entire in ``t = w**2 h**2``, so no square-root branch is
ever chosen.  The lam-derivative of each cell matrix is written down in
closed form and carried through the product as the lower block of
``[[M, 0], [dM, M]]``.  Every result is therefore exact for the piecewise
constant potential; the only discretisation error is the O(h**2) averaging
of q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .potential import cell_averages, reflect

_SMALL_T = 1e-4
_TAYLOR_TERMS = 8
_CHUNK_CELLS = 1 << 17

_FACT = [math.factorial(k) for k in range(2 * _TAYLOR_TERMS + 4)]


def default_steps(lam):
    """At least 8 cells per oscillation wavelength, never fewer than 256."""
    lam = np.max(np.abs(np.asarray(lam))) if np.ndim(lam) else abs(lam)
    return max(256, math.ceil(8.0 * math.sqrt(max(1.0, float(lam))) / math.pi))


def spectral_steps(n_max):
    """Resolution shared by every computation that touches mu_1..mu_{n_max}."""
    return default_steps((n_max * math.pi) ** 2)


def _series(t, coeffs):
    out = np.zeros_like(t)
    for c in reversed(coeffs):
        out = out * t + c
    return out


_C_SERIES = [(-1) ** k / _FACT[2 * k] for k in range(_TAYLOR_TERMS)]
_S_SERIES = [(-1) ** k / _FACT[2 * k + 1] for k in range(_TAYLOR_TERMS)]
_D_SERIES = [(-1) ** k * k / _FACT[2 * k + 1] for k in range(1, _TAYLOR_TERMS + 1)]
_G_SERIES = [(-1) ** (k + 1) / _FACT[2 * k + 1] for k in range(1, _TAYLOR_TERMS + 1)]


def trig_entire(t):
    """Return ``cos(sqrt t)``, ``sin(sqrt t)/sqrt t`` and ``(first - second)/(2 t)``.

    Works for real or complex arrays; switches to Taylor series for |t| < 1e-4.
    """
    t = np.asarray(t)
    small = np.abs(t) < _SMALL_T
    safe = np.where(small, 1.0, t)
    if np.iscomplexobj(t):
        r = np.sqrt(safe)
        c = np.cos(r)
        s = np.sin(r) / r
    else:
        r = np.sqrt(np.abs(safe))
        pos = safe > 0
        c = np.where(pos, np.cos(r), np.cosh(r))
        s = np.where(pos, np.sin(r), np.sinh(r)) / r
    d = (c - s) / (2.0 * safe)
    if np.any(small):
        ts = t[small]
        c[small] = _series(ts, _C_SERIES)
        s[small] = _series(ts, _S_SERIES)
        d[small] = _series(ts, _D_SERIES)
    return c, s, d


def _one_minus_sinc_over_t(t):
    # (1 - sin(sqrt t)/sqrt t) / t, entire in t
    t = np.asarray(t)
    small = np.abs(t) < 1e-2
    safe = np.where(small, 1.0, t)
    _, s, _ = trig_entire(safe)
    out = (1.0 - s) / safe
    if np.any(small):
        out[small] = _series(t[small], _G_SERIES)
    return out


def _check_lambda(lam):
    arr = np.asarray(lam)
    if not np.all(np.isfinite(arr)):
        raise DomainError("spectral parameter must be finite")
    if np.iscomplexobj(arr) and np.all(arr.imag == 0):
        arr = arr.real
    return arr


def cell_matrices(qbar, lam, h, derivative=True):
    """Cell propagators (and their lam-derivatives), shape (L, N, 2, 2)."""
    lam = np.atleast_1d(lam)
    w2 = lam[:, None] - qbar[None, :]
    c, s, d = trig_entire(w2 * (h * h))
    m = np.empty(w2.shape + (2, 2), dtype=c.dtype)
    m[..., 0, 0] = c
    m[..., 0, 1] = h * s
    m[..., 1, 0] = -w2 * h * s
    m[..., 1, 1] = c
    if not derivative:
        return m, None
    dm = np.empty_like(m)
    dm[..., 0, 0] = -0.5 * h * h * s
    dm[..., 0, 1] = h**3 * d
    dm[..., 1, 0] = -0.5 * h * (s + c)
    dm[..., 1, 1] = dm[..., 0, 0]
    return m, dm


def _reduce(m, dm):
    # ordered product M_{N-1} ... M_0 by pairwise halving
    while m.shape[1] > 1:
        n = m.shape[1]
        even = n - (n % 2)
        left, right = m[:, 1:even:2], m[:, 0:even:2]
        new_m = left @ right
        if dm is not None:
            new_dm = dm[:, 1:even:2] @ right + left @ dm[:, 0:even:2]
        if n % 2:
            new_m = np.concatenate([new_m, m[:, -1:]], axis=1)
            if dm is not None:
                new_dm = np.concatenate([new_dm, dm[:, -1:]], axis=1)
        m = new_m
        dm = new_dm if dm is not None else None
    return m[:, 0], (dm[:, 0] if dm is not None else None)


def propagate(qbar, lam, derivative=True, h=None):
    """Total propagator over the cells ``qbar`` for each lam, with lam-derivative.

    Cells have width ``h``, by default 1 / len(qbar).
    """
    lam = np.atleast_1d(lam)
    n = len(qbar)
    if h is None:
        h = 1.0 / n if n else 0.0
    chunk = max(1, _CHUNK_CELLS // max(n, 1))
    outs, douts = [], []
    for start in range(0, len(lam), chunk):
        m, dm = cell_matrices(qbar, lam[start:start + chunk], h, derivative)
        p, dp = _reduce(m, dm)
        outs.append(p)
        douts.append(dp)
    p = np.concatenate(outs)
    dp = np.concatenate(douts) if derivative else None
    return p, dp


@dataclass(frozen=True)
class FundamentalData:
    """c(1), c'(1), s(1), s'(1) and their lam-derivatives.

    Fields are scalars for a scalar ``lam`` and arrays for an array ``lam``.
    """

    lam: object
    c1: object
    dc1: object
    s1: object
    ds1: object
    c1_dl: object
    dc1_dl: object
    s1_dl: object
    ds1_dl: object
    steps: int

    @property
    def wronskian(self):
        return self.c1 * self.ds1 - self.dc1 * self.s1

    @property
    def asymmetry(self):
        return 0.5 * (self.c1 - self.ds1)

    def matrix(self):
        return np.array([[self.c1, self.s1], [self.dc1, self.ds1]])


def fundamental(q, lam, steps=None):
    """Fundamental data of ``q`` at ``lam`` (scalar or array, real or complex)."""
    arr = _check_lambda(lam)
    if steps is None:
        steps = default_steps(arr)
    if steps < 16:
        raise DomainError("steps must be at least 16")
    p, dp = propagate(cell_averages(q, steps), arr.ravel())
    scalar = arr.ndim == 0

    def pick(a, i, j):
        v = a[:, i, j].reshape(arr.shape)
        return v.item() if scalar else v

    return FundamentalData(
        lam=lam, steps=steps,
        c1=pick(p, 0, 0), dc1=pick(p, 1, 0), s1=pick(p, 0, 1), ds1=pick(p, 1, 1),
        c1_dl=pick(dp, 0, 0), dc1_dl=pick(dp, 1, 0), s1_dl=pick(dp, 0, 1), ds1_dl=pick(dp, 1, 1),
    )


def transfer(q, lam, steps=None, x0=0.0, x1=1.0):
    """2x2 matrix taking Cauchy data (u, u') at ``x0`` to ``x1``.

    ``x0`` and ``x1`` must sit on the cell grid of ``steps`` cells.
    """
    arr = _check_lambda(lam)
    if arr.ndim:
        raise DomainError("transfer takes a scalar spectral parameter")
    if steps is None:
        steps = default_steps(arr)
    i0, i1 = round(x0 * steps), round(x1 * steps)
    if not (0 <= i0 <= i1 <= steps) or abs(i0 - x0 * steps) > 1e-9 or abs(i1 - x1 * steps) > 1e-9:
        raise DomainError("x0 <= x1 must be cell boundaries in [0, 1]")
    if i0 == i1:
        return np.eye(2)
    p, _ = propagate(cell_averages(q, steps)[i0:i1], arr.reshape(1), derivative=False, h=1.0 / steps)
    return p[0]


def trajectory(q, lam, steps=None, init=(0.0, 1.0), cell_l2=False):
    """Solution values on the cell grid.

    Returns ``(x, u, du)`` with ``u`` and ``du`` of shape (len(lam), steps + 1)
    (squeezed for scalar lam).  With ``cell_l2`` also returns the exact
    integral of ``u**2`` over each cell, shape (len(lam), steps).
    """
    arr = _check_lambda(lam)
    if steps is None:
        steps = default_steps(arr)
    lam1 = np.atleast_1d(arr).ravel()
    qbar = cell_averages(q, steps)
    h = 1.0 / steps
    w2 = lam1[:, None] - qbar[None, :]
    t = w2 * h * h
    c, s, _ = trig_entire(t)
    dtype = c.dtype
    u = np.empty((len(lam1), steps + 1), dtype=dtype)
    du = np.empty_like(u)
    u[:, 0], du[:, 0] = init
    for i in range(steps):
        u[:, i + 1] = c[:, i] * u[:, i] + h * s[:, i] * du[:, i]
        du[:, i + 1] = -w2[:, i] * h * s[:, i] * u[:, i] + c[:, i] * du[:, i]
    x = np.linspace(0.0, 1.0, steps + 1)
    out = [x, u, du]
    if cell_l2:
        _, s4, _ = trig_entire(4.0 * t)
        g4 = _one_minus_sinc_over_t(4.0 * t)
        u0, v0 = u[:, :-1], du[:, :-1]
        out.append(u0 * u0 * 0.5 * h * (1.0 + s4) + v0 * v0 * 2.0 * h**3 * g4 + u0 * v0 * h * h * s * s)
    if arr.ndim == 0:
        out = [out[0]] + [a[0] for a in out[1:]]
    return tuple(out)


def prufer_count(q, lam, steps=None):
    """Number of Dirichlet eigenvalues strictly below ``lam`` (real).

    Counts zeros of s(., lam) in the open interval (0, 1) by tracking the
    scaled Pruefer phase cell by cell; on oscillatory cells the phase advances
    by exactly w h, on the others a zero shows up as a sign change.
    Accepts scalar or array ``lam``.
    """
    arr = np.asarray(lam, dtype=float)
    if steps is None:
        steps = default_steps(arr)
    lam1 = np.atleast_1d(arr).ravel()
    qbar = cell_averages(q, steps)
    h = 1.0 / steps
    u = np.zeros_like(lam1)
    v = np.ones_like(lam1)
    count = np.zeros(lam1.shape, dtype=np.int64)
    for i in range(steps):
        w2 = lam1 - qbar[i]
        c, s, _ = trig_entire(w2 * h * h)
        u1 = c * u + h * s * v
        v1 = -w2 * h * s * u + c * v
        osc = w2 > 0
        w = np.sqrt(np.where(osc, w2, 0.0))
        phase0 = np.mod(np.arctan2(w * u, v), np.pi)
        total = phase0 + w * h
        last = i == steps - 1
        if last:
            osc_zeros = np.ceil(total / np.pi) - 1
            flat_zeros = (u * u1 < 0)
        else:
            osc_zeros = np.floor(total / np.pi)
            flat_zeros = (u * u1 < 0) | ((u1 == 0) & (u != 0))
        count += np.where(osc, osc_zeros, flat_zeros).astype(np.int64)
        norm = np.hypot(u1, v1)
        u, v = u1 / norm, v1 / norm
    return int(count[0]) if arr.ndim == 0 else count.reshape(arr.shape)


def reflected_c1(q, lam, steps=None):
    """c(1, lam) of the reflected potential x -> q(1 - x)."""
    return fundamental(reflect(q), lam, steps).c1
