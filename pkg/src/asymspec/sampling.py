"""Sampling and interpolation on the Dirichlet spectrum.

The reproducing kernel of the de Branges space built from
e(w) = s'(1, w^2) - i w s(1, w^2), the discrete A-form on the nodes
{0, +-sqrt(mu_j)}, the Lagrange-type interpolation of an entire function of
order 1/2 from its values at mu_j, and the kernel K(n, j) that resamples
a(pi^2 j^2) onto pi^2 n^2 + c_n.

Every truncated sum comes back as ``Truncated(value, tail)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PoleError, PreconditionError
from .potential import Potential, shift
from .propagator import default_steps, fundamental, spectral_steps
from .spectrum import dirichlet_eigenvalues

PI2 = math.pi**2
_PRECONDITION_MARGIN = 1e-6


class Truncated(NamedTuple):
    value: object
    tail: object


def default_truncation(largest_index):
    """J = 2x the largest index of interest, at least 64."""
    return max(64, 2 * int(largest_index))


# nodes ---------------------------------------------------------------------


@dataclass(frozen=True)
class NodeSet:
    """Dirichlet data of ``potential`` needed by the A-form and interpolation.

    ``shift`` is the constant added to the caller's potential so that
    mu_1 > 0 and s(1, 0), s'(1, 0) are nonzero; ``potential`` already
    includes it.
    """

    potential: Potential
    mu: np.ndarray
    s_prime: np.ndarray
    s_dot: np.ndarray
    norming: np.ndarray
    s0: float
    ds0: float
    steps: int
    shift: float = 0.0

    @property
    def J(self):
        return len(self.mu)

    def satisfies_preconditions(self):
        return bool(
            self.mu[0] > _PRECONDITION_MARGIN
            and abs(self.s0) > _PRECONDITION_MARGIN
            and abs(self.ds0) > _PRECONDITION_MARGIN
        )


def _raw_nodes(q, J, steps, delta=0.0):
    p = shift(q, delta) if delta else q
    mu = dirichlet_eigenvalues(p, J, steps)
    f = fundamental(p, mu, steps)
    f0 = fundamental(p, 0.0, steps)
    return NodeSet(p, mu, f.ds1, f.s1_dl, f.ds1 * f.s1_dl, f0.s1, f0.ds1, steps, delta)


def preshift(q, steps=None):
    """Smallest shift in {0, 1 - mu_1, then +0.5 steps} meeting the preconditions."""
    steps = steps or spectral_steps(8)
    mu1 = float(dirichlet_eigenvalues(q, 1, steps)[0])
    delta = 0.0 if mu1 > _PRECONDITION_MARGIN else 1.0 - mu1
    for _ in range(64):
        f0 = fundamental(q, -delta, steps)
        if mu1 + delta > _PRECONDITION_MARGIN and min(abs(f0.s1), abs(f0.ds1)) > _PRECONDITION_MARGIN:
            return delta
        delta += 0.5
    raise PreconditionError("no admissible pre-shift found")


def node_set(q, J, steps=None, auto_shift=False):
    """First ``J`` nodes of ``q``; with ``auto_shift`` the potential is pre-shifted if needed."""
    if J < 1:
        raise DomainError("J must be at least 1")
    steps = steps or spectral_steps(J)
    delta = preshift(q, steps) if auto_shift else 0.0
    return _raw_nodes(q, J, steps, delta)


def _require(nodes):
    if not nodes.satisfies_preconditions():
        raise PreconditionError(
            "need mu_1 > 0, s(1,0) != 0 and s'(1,0) != 0; pre-shift the potential "
            "(node_set(..., auto_shift=True) or asymspec.sampling.preshift)"
        )


def node_points(nodes):
    """Evaluation points [0, +sqrt(mu_1..J), -sqrt(mu_1..J)] of the A-form."""
    r = np.sqrt(nodes.mu)
    return np.concatenate([[0.0], r, -r])


# de Branges function and kernel ----------------------------------------------


def e_function(q, omega, steps=None):
    """e(w) = s'(1, w^2) - i w s(1, w^2)."""
    omega = np.asarray(omega, dtype=complex)
    f = fundamental(q, omega * omega, steps)
    out = f.ds1 - 1j * omega * f.s1
    return complex(out) if np.ndim(out) == 0 else out


def kernel_one(q, alpha, beta, steps=None):
    """Reproducing kernel 1_alpha(beta), scalar ``alpha``, scalar or array ``beta``.

    Uses (a s(a^2) s'(b^2) - b s'(a^2) s(b^2)) / (a - b) with a = conj(alpha);
    within 1e-6 (1 + |alpha|) of the diagonal the difference quotient is
    replaced by the average of the derivatives at both ends.
    """
    a = complex(np.conj(alpha))
    b = np.atleast_1d(np.asarray(beta, dtype=complex))
    lam = np.concatenate([[a * a], b * b])
    if steps is None:
        steps = default_steps(lam)
    # +-beta share beta^2, so propagate each distinct lam once
    uniq, inv = np.unique(lam, return_inverse=True)
    f = fundamental(q, uniq, steps)
    s1, ds1, s1_dl, ds1_dl = (np.atleast_1d(v)[inv] for v in (f.s1, f.ds1, f.s1_dl, f.ds1_dl))
    sa, dsa = s1[0], ds1[0]
    s, ds, sd, dsd = s1[1:], ds1[1:], s1_dl[1:], ds1_dl[1:]
    fa, ga = a * sa, dsa
    near = np.abs(a - b) < 1e-6 * (1.0 + abs(alpha))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = (fa * ds - b * ga * s) / (a - b)

    def dn(x, sx, sdx, dsdx):
        # derivative of F(a) G(x) - G(a) F(x), F(x) = x s(x^2), G(x) = s'(x^2)
        return fa * 2 * x * dsdx - ga * (sx + 2 * x * x * sdx)

    out = direct
    if near.any():
        da = dn(a, sa, s1_dl[0], ds1_dl[0])
        db = dn(b, s, sd, dsd)
        out = np.where(near, -0.5 * (da + db), direct)
    if np.ndim(beta) == 0:
        return complex(out[0])
    return out


# A-form and the resolvent identity ------------------------------------------


def _samples_at(nodes, f):
    pts = node_points(nodes)
    if callable(f):
        vals = np.asarray(f(pts), dtype=complex)
    else:
        vals = np.asarray(f, dtype=complex)
    if vals.shape != pts.shape:
        raise DomainError(f"expected {len(pts)} samples at [0, +sqrt(mu), -sqrt(mu)], got {vals.shape}")
    return vals


def _power_tail(terms, J):
    # tail bound C/J for terms decaying like 1/j^2, C from the last quarter
    j = np.arange(1, len(terms) + 1)
    start = max(0, (3 * len(terms)) // 4)
    c = float(np.max(j[start:] ** 2 * np.abs(terms[start:]))) if len(terms) else 0.0
    return c / J


def a_form(q, f_samples, g_samples, J=None, steps=None):
    """Truncated A[f, g] with the tail bound C / J.

    ``q`` is a Potential or a :class:`NodeSet`.  Samples are callables of w
    or arrays ordered as :func:`node_points`.
    """
    nodes = q if isinstance(q, NodeSet) else node_set(q, J or 64, steps)
    _require(nodes)
    f = _samples_at(nodes, f_samples)
    g = _samples_at(nodes, g_samples)
    J = nodes.J
    w = 1.0 / (2.0 * nodes.mu * nodes.norming)
    prod = f * np.conj(g)
    terms = w * (prod[1:J + 1] + prod[J + 1:])
    head = prod[0] / (nodes.ds0 * nodes.s0)
    value = head + np.sum(terms)
    return Truncated(value, _power_tail(terms, J))


def resolvent_identity_residual(q, omega1, omega2, J, steps=None):
    """|two-point resolvent identity| truncated at J; decays like C / J.

    sum_j s'(1,mu_j)^2 / l_j^2 [1/(mu_j - w1^2) - 1/(mu_j - w2^2)]
        + s'/s (w1^2) - s'/s (w2^2)
    """
    nodes = q if isinstance(q, NodeSet) else node_set(q, J, steps)
    _require(nodes)
    if omega1 == omega2:
        return 0.0
    mu = nodes.mu[:J]
    l1, l2 = complex(omega1) ** 2, complex(omega2) ** 2
    f = fundamental(nodes.potential, np.array([l1, l2]), nodes.steps)
    for lam, s in zip((l1, l2), f.s1):
        if abs(s) <= 1e-8 * (1.0 + abs(lam)) ** -0.5:
            raise PoleError(f"w^2 = {lam} is a Dirichlet eigenvalue", nearest=lam)
    weight = nodes.s_prime[:J] ** 2 / nodes.norming[:J]
    terms = weight * (1.0 / (mu - l1) - 1.0 / (mu - l2))
    ratio = f.ds1 / f.s1
    total = np.sum(terms) + ratio[0] - ratio[1]
    return float(abs(total))


# interpolation -------------------------------------------------------------


@dataclass(frozen=True)
class SampledEntireFunction:
    """Values of phi at nodes mu_j, with weights sdot(1, mu_j) of the node potential.

    Samples past ``truncation`` are not summed; they only sharpen the tail bound.
    """

    nodes: np.ndarray
    weights: np.ndarray
    samples: np.ndarray
    truncation: int

    def __post_init__(self):
        n = len(self.nodes)
        if len(self.weights) != n or len(self.samples) != n:
            raise DomainError("nodes, weights and samples must have equal lengths")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(self.weights == 0):
            raise DomainError("weights must be nonzero")
        if not 1 <= self.truncation <= n:
            raise DomainError("truncation must lie in [1, len(nodes)]")


def sample_on_spectrum(p, phi, count, J=None, steps=None):
    """Sample ``phi`` (callable of lam) on the first ``count`` eigenvalues of ``p``.

    Returns the sampled function and a callable lam -> s(1, lam; p) on the
    same grid.
    """
    steps = steps or spectral_steps(count)
    mu = dirichlet_eigenvalues(p, count, steps)
    f = fundamental(p, mu, steps)
    sf = SampledEntireFunction(mu, f.s1_dl, np.asarray(phi(mu), dtype=float), J or count)
    return sf, (lambda lam: fundamental(p, lam, steps).s1)


def _l21_tail(samples, J):
    """Estimate of sum_{j > J} j^2 phi_j^2 from the samples past J and a power-law fit."""
    n = len(samples)
    j = np.arange(1, n + 1)
    e = (j * samples) ** 2
    known = float(np.sum(e[J:]))
    start = (3 * n) // 4
    jj, ee = j[start:], e[start:]
    keep = ee > 0
    if keep.sum() < 2:
        return known
    # fit the envelope j^2 phi_j^2 ~ A j^-p on the last quarter
    slope, icpt = np.polyfit(np.log(jj[keep]), np.log(ee[keep]), 1)
    p = min(max(-slope, 1.05), 8.0)
    amp = float(np.max(ee[keep] * jj[keep] ** p))
    beyond = amp * n ** (1.0 - p) / (p - 1.0)
    return known + beyond


def interpolate(sf, target_s1, lam):
    """phi(lam) = sum_{j <= J} phi(mu_j) s(1, lam) / (sdot(1, mu_j) (lam - mu_j)).

    ``target_s1`` maps lam to s(1, lam) of the node potential (a pair is
    accepted, its first entry is used).  Within 1e-8 of a node the stored
    sample is returned.  The tail is the Cauchy-Schwarz bound
    W (sum_{j>J} j^2 phi_j^2)^(1/2) (sum_{j>J} j^-2)^(1/2).
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    J = sf.truncation
    mu, wt, ph = sf.nodes[:J], sf.weights[:J], sf.samples[:J]
    s = target_s1(lam_arr)
    if isinstance(s, tuple):
        s = s[0]
    s = np.atleast_1d(np.asarray(s, dtype=float))
    diff = lam_arr[:, None] - mu[None, :]
    hit = np.abs(diff) <= 1e-8 * np.maximum(1.0, np.abs(mu))[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        w = s[:, None] / (wt[None, :] * diff)
    value = np.sum(np.where(hit, 0.0, ph * w), axis=1)
    half = J // 2
    wmax = np.max(np.abs(np.where(hit, 0.0, w))[:, half:], axis=1)
    # |w_j| tends to 2 |s(1, lam)|, from below when lam < 0
    weight = np.maximum(np.maximum(2.0, 2.0 * np.abs(s)), wmax)
    inv_sq = math.pi**2 / 6 - float(np.sum(1.0 / np.arange(1, J + 1) ** 2))
    tail = weight * math.sqrt(_l21_tail(sf.samples, J) * max(inv_sq, 0.0))
    on_node = hit.any(axis=1)
    if on_node.any():
        idx = np.argmax(hit, axis=1)
        value = np.where(on_node, ph[idx], value)
        tail = np.where(on_node, 0.0, tail)
    if np.ndim(lam) == 0:
        return Truncated(float(value[0]), float(tail[0]))
    return Truncated(value, tail)


# the resampling kernel K(n, j) -------------------------------------------------


def k_kernel(n, j, c_n):
    """K(n, j) in closed form, vectorised over broadcastable inputs.

    With w = n^2 + c_n / pi^2 and z = sqrt(w):
    K = (-1)^(j+1) 2 n j / (j^2 - w) * sinc(pi z).  sin(pi z) is evaluated as
    (-1)^m sin(pi (z - m)) about the nearest integer m, with z - m formed
    from the exact integer n^2 - m^2, so the kernel is exactly the identity
    when c_n = 0 and smooth through j^2 = w.
    """
    n, j, c = np.broadcast_arrays(np.asarray(n, dtype=float), np.asarray(j, dtype=float), np.asarray(c_n, dtype=float))
    if np.any(n < 1) or np.any(j < 1):
        raise DomainError("n and j must be >= 1")
    gamma = c / PI2
    w = n * n + gamma
    sign_j = np.where(np.mod(j, 2) == 1, 1.0, -1.0)
    out = np.empty(w.shape)

    pos = w > 0
    z = np.sqrt(np.where(pos, w, 1.0))
    m = np.round(z)
    delta = ((n * n - m * m) + gamma) / (z + m)
    sign_m = np.where(np.mod(m, 2) == 0, 1.0, -1.0)
    sin_pz = sign_m * np.sin(math.pi * delta)
    gap = (j * j - n * n) - gamma
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        general = sign_j * 2 * n * j / gap * sin_pz / (math.pi * z)
        on_j = 2 * n * j * np.sinc(delta) / (z * (z + j))
    out = np.where(pos & (m == j), on_j, general)

    neg = w < 0
    if neg.any():
        v = np.sqrt(np.where(neg, -w, 1.0))
        sh = np.where(v < 1e-8, 1.0, np.sinh(math.pi * v) / (math.pi * v))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.where(neg, sign_j * 2 * n * j / gap * sh, out)

    # exact values at the degeneracies
    tiny = 1e-13
    out = np.where(np.abs(gap) <= tiny * j * j, n / j, out)
    out = np.where(np.abs(w) <= tiny * n * n, sign_j * 2 * n / j, out)
    return float(out) if out.ndim == 0 else out


def k_kernel_product_oracle(n, j, c_n, factors=10_000, tail=True):
    """K(n, j) = (n/j) prod_{k != j} (k^2 - w) / (k^2 - j^2), truncated at ``factors``.

    The remaining factors 1 + d / (k^2 - j^2), d = j^2 - w, contribute
    exp(d S1 - d^2 S2 / 2) with S1 = sum_{k > K} 1/(k^2 - j^2) in closed
    form and S2 ~ 1 / (3 K^3).
    """
    if factors < 1000:
        raise DomainError("factors must be at least 1000")
    if factors <= j:
        raise DomainError("factors must exceed j")
    gamma = c_n / PI2
    k = np.arange(1, factors + 1, dtype=float)
    k = k[k != j]
    num = (k * k - n * n) - gamma
    den = k * k - j * j
    if np.any(num == 0):
        return 0.0
    ratio = num / den
    sign = -1.0 if np.count_nonzero(ratio < 0) % 2 else 1.0
    log_abs = float(np.sum(np.log(np.abs(ratio))))
    if tail:
        d = (j * j - n * n) - gamma
        m = np.arange(factors - j + 1, factors + j + 1, dtype=float)
        s1 = float(np.sum(1.0 / m)) / (2 * j)
        s2 = 1.0 / (3.0 * factors**3)
        log_abs += d * s1 - 0.5 * d * d * s2
    return sign * (n / j) * math.exp(log_abs)


def _k_sq_tail(n, c_n, J, M):
    # sum_{j > J} K(n, j)^2: exact up to M, then K(n, j)^2 ~ A / j^2 beyond
    k = k_kernel(n, np.arange(J + 1, M + 1), c_n)
    return float(np.sum(k * k) + k[-1] ** 2 * M)


def resample(a_samples, c, sigma, J=None):
    """alpha_n = a(pi^2 n^2 + c + sigma_n) from a_j = a(pi^2 j^2).

    n alpha_n = sum_{j <= J} j a_j K(n, j; c + sigma_n); the tail is the
    Cauchy-Schwarz bound (sum_{j>J} j^2 a_j^2)^(1/2) (sum_{j>J} K^2)^(1/2) / n.
    """
    a = np.asarray(a_samples, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    J = len(a) if J is None else J
    if not 1 <= J <= len(a):
        raise DomainError("J must lie in [1, len(a_samples)]")
    n = np.arange(1, len(sigma) + 1, dtype=float)
    j = np.arange(1, J + 1, dtype=float)
    cn = c + sigma
    kmat = k_kernel(n[:, None], j[None, :], cn[:, None])
    alpha = (kmat @ (j * a[:J])) / n
    a_tail = _l21_tail(a, J)
    k_tail = np.array([_k_sq_tail(ni, ci, J, 4 * J) for ni, ci in zip(n, cn)])
    return Truncated(alpha, np.sqrt(a_tail * k_tail) / n)


def kernel_matrix(c_seq, N):
    n = np.arange(1, N + 1, dtype=float)
    return k_kernel(n[:, None], n[None, :], np.asarray(c_seq[:N], dtype=float)[:, None])


def k_bound_check(c_seq, N):
    """(max_n |K(n, n)|, sum_{n != j <= N} K(n, j)^2)."""
    c_seq = np.asarray(c_seq, dtype=float)
    if len(c_seq) < N:
        raise DomainError("c_seq must have at least N entries")
    k = kernel_matrix(c_seq, N)
    diag = np.diag(k)
    off = k - np.diag(diag)
    return float(np.max(np.abs(diag))), float(np.sum(off * off))
