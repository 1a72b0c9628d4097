"""Real square-integrable potentials on [0, 1].

Three representations are supported:

``fourier``
    ``mean + sum_k cos_k cos(2 pi k x) + sin_k sin(2 pi k x)``.  The period-1
    modes make reflection about x = 1/2 a sign flip of the sine coefficients.
``grid``
    ``M + 1`` uniform samples on [0, 1], linearly interpolated.
``piecewise``
    ``M`` values on equal cells, left-closed (the last cell also owns x = 1).

Everything the propagator needs is the exact cell average over a uniform
partition, which :func:`cell_averages` provides for each basis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, FormatError

BASES = ("fourier", "grid", "piecewise")


def _as_tuple(values):
    arr = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise DomainError("potential coefficients must be finite reals")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class Potential:
    basis: str = "fourier"
    mean: float = 0.0
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()
    grid_values: tuple = ()

    def __post_init__(self):
        if self.basis not in BASES:
            raise DomainError(f"unknown basis {self.basis!r}")
        if not np.isfinite(self.mean):
            raise DomainError("mean must be finite")
        object.__setattr__(self, "mean", float(self.mean))
        for name in ("cos_coeffs", "sin_coeffs", "grid_values"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name)))
        if self.basis == "fourier":
            if self.grid_values:
                raise DomainError("fourier potentials carry no grid values")
        else:
            if self.cos_coeffs or self.sin_coeffs or self.mean != 0.0:
                raise DomainError(f"{self.basis} potentials carry only grid values")
            need = 2 if self.basis == "grid" else 1
            if len(self.grid_values) < need:
                raise DomainError(f"{self.basis} basis needs at least {need} values")

    # constructors -----------------------------------------------------

    @classmethod
    def fourier(cls, mean=0.0, cos=(), sin=()):
        return cls("fourier", mean, tuple(cos), tuple(sin))

    @classmethod
    def constant(cls, value):
        return cls("fourier", value)

    @classmethod
    def zero(cls):
        return cls("fourier", 0.0)

    @classmethod
    def grid(cls, values):
        return cls("grid", grid_values=tuple(values))

    @classmethod
    def piecewise(cls, values):
        return cls("piecewise", grid_values=tuple(values))

    @classmethod
    def from_function(cls, f, samples=257):
        """Grid potential sampling ``f`` at ``samples`` uniform points."""
        x = np.linspace(0.0, 1.0, samples)
        return cls.grid(np.vectorize(f, otypes=[float])(x))

    # convenience ------------------------------------------------------

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def n_modes(self):
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    def padded(self, n_modes):
        """Fourier coefficient arrays zero-padded to ``n_modes``."""
        cos = np.zeros(n_modes)
        sin = np.zeros(n_modes)
        cos[: len(self.cos_coeffs)] = self.cos_coeffs[:n_modes]
        sin[: len(self.sin_coeffs)] = self.sin_coeffs[:n_modes]
        return cos, sin


def evaluate(q, x):
    """Value of ``q`` at ``x`` (scalar or array) in [0, 1]."""
    xs = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError("x must lie in [0, 1]")
    if q.basis == "fourier":
        out = np.full(xs.shape, q.mean)
        for k, a in enumerate(q.cos_coeffs, start=1):
            out = out + a * np.cos(2 * np.pi * k * xs)
        for k, b in enumerate(q.sin_coeffs, start=1):
            out = out + b * np.sin(2 * np.pi * k * xs)
    elif q.basis == "grid":
        v = np.asarray(q.grid_values)
        out = np.interp(xs, np.linspace(0.0, 1.0, len(v)), v)
    else:
        v = np.asarray(q.grid_values)
        idx = np.minimum((xs * len(v)).astype(int), len(v) - 1)
        out = v[idx]
    return float(out) if np.ndim(out) == 0 else out


def reflect(q):
    """The potential x -> q(1 - x)."""
    if q.basis == "fourier":
        return Potential.fourier(q.mean, q.cos_coeffs, tuple(-b for b in q.sin_coeffs))
    return Potential(q.basis, grid_values=q.grid_values[::-1])


def odd_part(q):
    """(q(x) - q(1 - x)) / 2."""
    if q.basis == "fourier":
        return Potential.fourier(0.0, (), q.sin_coeffs)
    v = np.asarray(q.grid_values)
    return Potential(q.basis, grid_values=0.5 * (v - v[::-1]))


def even_part(q):
    """(q(x) + q(1 - x)) / 2."""
    if q.basis == "fourier":
        return Potential.fourier(q.mean, q.cos_coeffs, ())
    v = np.asarray(q.grid_values)
    return Potential(q.basis, grid_values=0.5 * (v + v[::-1]))


def shift(q, delta):
    """q + delta."""
    if q.basis == "fourier":
        return Potential.fourier(q.mean + delta, q.cos_coeffs, q.sin_coeffs)
    return Potential(q.basis, grid_values=np.asarray(q.grid_values) + delta)


def l2_norm(q):
    """L2[0,1] norm, exact for every basis."""
    if q.basis == "fourier":
        cos = np.asarray(q.cos_coeffs)
        sin = np.asarray(q.sin_coeffs)
        return float(np.sqrt(q.mean**2 + 0.5 * (cos @ cos + sin @ sin)))
    v = np.asarray(q.grid_values)
    if q.basis == "piecewise":
        return float(np.sqrt(np.mean(v * v)))
    a, b = v[:-1], v[1:]
    h = 1.0 / (len(v) - 1)
    return float(np.sqrt(np.sum(h * (a * a + a * b + b * b) / 3.0)))


def l2_distance(p, q, samples=4097):
    """L2 distance between two potentials.

    Exact when both are Fourier; otherwise Simpson on a fine grid.
    """
    if p.basis == q.basis == "fourier":
        n = max(p.n_modes, q.n_modes)
        pc, ps = p.padded(n)
        qc, qs = q.padded(n)
        diff = Potential.fourier(p.mean - q.mean, pc - qc, ps - qs)
        return l2_norm(diff)
    from scipy.integrate import simpson

    x = np.linspace(0.0, 1.0, samples)
    d = np.asarray(evaluate(p, x)) - np.asarray(evaluate(q, x))
    return float(np.sqrt(max(simpson(d * d, x=x), 0.0)))


def integral(q):
    """The integral of q over [0, 1]."""
    if q.basis == "fourier":
        return q.mean
    return float(_antiderivative(q, np.array([1.0]))[0])


def _antiderivative(q, x):
    # exact running integral from 0 for the grid and piecewise bases
    v = np.asarray(q.grid_values)
    if q.basis == "grid":
        m = len(v) - 1
        h = 1.0 / m
        nodes = np.concatenate([[0.0], np.cumsum(0.5 * h * (v[:-1] + v[1:]))])
        i = np.minimum((x * m).astype(int), m - 1)
        t = x - i * h
        slope = (v[i + 1] - v[i]) / h
        return nodes[i] + v[i] * t + 0.5 * slope * t * t
    if q.basis == "piecewise":
        m = len(v)
        h = 1.0 / m
        nodes = np.concatenate([[0.0], np.cumsum(h * v)])
        i = np.minimum((x * m).astype(int), m - 1)
        return nodes[i] + v[i] * (x - i * h)
    raise DomainError("fourier antiderivative is handled in closed form")


@lru_cache(maxsize=256)
def cell_averages(q, steps):
    """Exact averages of q over ``steps`` equal cells of [0, 1]."""
    h = 1.0 / steps
    if q.basis == "fourier":
        mid = (np.arange(steps) + 0.5) * h
        out = np.full(steps, q.mean)
        for k, a in enumerate(q.cos_coeffs, start=1):
            out += a * np.cos(2 * np.pi * k * mid) * np.sinc(k * h)
        for k, b in enumerate(q.sin_coeffs, start=1):
            out += b * np.sin(2 * np.pi * k * mid) * np.sinc(k * h)
    else:
        edges = np.arange(steps + 1) * h
        edges[-1] = 1.0
        out = np.diff(_antiderivative(q, edges)) / h
    out.setflags(write=False)
    return out


# JSON --------------------------------------------------------------------

_KEYS = {
    "fourier": {"basis", "mean", "cos", "sin"},
    "grid": {"basis", "values"},
    "piecewise": {"basis", "values"},
}


def to_dict(q):
    if q.basis == "fourier":
        return {"basis": "fourier", "mean": q.mean, "cos": list(q.cos_coeffs), "sin": list(q.sin_coeffs)}
    return {"basis": q.basis, "values": list(q.grid_values)}


def from_dict(d):
    if not isinstance(d, dict) or "basis" not in d:
        raise FormatError("potential must be a JSON object with a 'basis' field")
    basis = d["basis"]
    if basis not in _KEYS:
        raise FormatError(f"unknown basis {basis!r}")
    extra = set(d) - _KEYS[basis]
    if extra:
        raise FormatError(f"unknown fields for {basis} potential: {sorted(extra)}")

    def numbers(key, default=()):
        raw = d.get(key, default)
        if not isinstance(raw, (list, tuple)) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
        ):
            raise FormatError(f"'{key}' must be a list of numbers")
        return tuple(raw)

    try:
        if basis == "fourier":
            mean = d.get("mean", 0.0)
            if not isinstance(mean, (int, float)) or isinstance(mean, bool):
                raise FormatError("'mean' must be a number")
            return Potential.fourier(mean, numbers("cos"), numbers("sin"))
        if "values" not in d:
            raise FormatError(f"{basis} potential needs 'values'")
        return Potential(basis, grid_values=numbers("values"))
    except DomainError as exc:
        raise FormatError(str(exc)) from exc


def dumps(q):
    return json.dumps(to_dict(q))


def loads(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return from_dict(d)
