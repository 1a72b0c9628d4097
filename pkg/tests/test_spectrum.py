import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymspec import (
    DomainError,
    FormatError,
    InconsistencyError,
    Potential,
    dirichlet_eigenvalues,
    estimate_mean,
    fundamental,
    norming_constants,
    spectral_triple,
)
from asymspec.potential import reflect, shift
from asymspec.propagator import spectral_steps, trajectory
from asymspec.spectrum import certify, spectral_dumps, spectral_from_dict
from conftest import linear_fn
from oracles import quad_norming, scan_eigenvalues

PI2 = math.pi**2


def test_free_eigenvalues():
    n = np.arange(1, 65)
    assert np.allclose(dirichlet_eigenvalues(Potential.zero(), 64), PI2 * n**2, rtol=1e-9)


def test_constant_shift_eigenvalues():
    n = np.arange(1, 33)
    assert np.allclose(dirichlet_eigenvalues(Potential.constant(3.7), 32), PI2 * n**2 + 3.7, rtol=1e-9)


def test_linear_potential_against_scan():
    mu = dirichlet_eigenvalues(Potential.grid([0.0, 1.0]), 5, 4096)
    ref = scan_eigenvalues(linear_fn, 5)
    assert np.allclose(mu, ref, rtol=1e-9)
    assert abs(mu[0] - PI2 - 0.5) < 0.05


def test_strong_potential_brackets():
    q = Potential.piecewise([200.0, -150.0, 80.0])
    mu = dirichlet_eigenvalues(q, 12, 3072)
    assert np.all(np.diff(mu) > 0)
    assert certify(q, mu, 3072).all()
    ref = scan_eigenvalues(lambda x: [200.0, -150.0, 80.0][min(int(3 * x), 2)], 12, lam_max=2500, per=60, lo=-200.0)
    # cell edges align with the jumps: the frozen-cell operator is exact here
    assert np.allclose(mu, ref, rtol=1e-8)


def test_eigenvalues_validation():
    with pytest.raises(DomainError):
        dirichlet_eigenvalues(Potential.zero(), 0)


def test_free_norming_constants():
    n = np.arange(1, 33)
    mu = PI2 * n**2
    assert np.allclose(norming_constants(Potential.zero(), mu), 1.0 / (2 * PI2 * n**2), rtol=1e-9)


def test_norming_against_ode_quadrature():
    q = Potential.constant(2.0)
    mu = dirichlet_eigenvalues(q, 4)
    ref = [quad_norming(lambda x: 2.0, m) for m in mu]
    assert np.allclose(norming_constants(q, mu), ref, rtol=1e-9)


def test_norming_dual_routes_agree():
    q = Potential.grid([0.0, 1.0])
    steps = spectral_steps(32)
    mu = dirichlet_eigenvalues(q, 32, steps)
    ident = norming_constants(q, mu, steps, check=False)
    _, _, _, cells = trajectory(q, mu, steps, cell_l2=True)
    assert np.max(np.abs(cells.sum(axis=1) - ident) / ident) <= 1e-7


def test_norming_rejects_non_eigenvalues():
    with pytest.raises(InconsistencyError):
        norming_constants(Potential.zero(), [PI2 * 1.3])


def test_norming_asymptotics():
    t = spectral_triple(Potential.fourier(0.5, (0.3,), (0.4,)), 64)
    prod = 2 * t.mu * t.norming
    assert abs(prod[-1] - 1) < abs(prod[3] - 1) + 1e-12
    assert abs(prod[-1] - 1) < 1e-3


@pytest.mark.parametrize("gamma", [0.0, -4.0, 6.5])
def test_symmetric_constant_triple(gamma):
    t = spectral_triple(Potential.constant(gamma), 16)
    assert t.c == pytest.approx(gamma, abs=1e-9)
    assert np.max(np.abs(t.sigma)) < 1e-8
    assert np.max(np.abs(t.kappa)) < 1e-9
    assert np.max(np.abs(t.alpha)) < 1e-9


def test_linear_alpha_matches_direct_evaluation():
    q = Potential.grid([0.0, 1.0])
    t = spectral_triple(q, 8)
    f = fundamental(q, t.mu[0], t.steps)
    assert t.alpha[0] == pytest.approx(0.5 * (f.c1 - f.ds1), abs=1e-9)
    assert np.allclose(t.alpha, (-1.0) ** (np.arange(1, 9) + 1) * np.sinh(t.kappa), atol=0)


def test_estimate_mean_examples():
    n = np.arange(1, 17)
    assert estimate_mean(PI2 * n**2) == 0.0
    assert estimate_mean(PI2 * n**2 + 3) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(DomainError):
        estimate_mean([1.0, 2.0])


def test_estimate_mean_improves_with_length():
    q = Potential.grid([0.0, 1.0])
    mu = dirichlet_eigenvalues(q, 64)
    errs = [abs(estimate_mean(mu[:k]) - 0.5) for k in (8, 16, 32, 64)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_certification_and_monotonicity():
    q = Potential.fourier(0.5, (0.3,), (0.4,))
    mu = dirichlet_eigenvalues(q, 40)
    assert np.all(np.diff(mu) > 0)
    assert certify(q, mu).all()


def test_shift_covariance():
    q = Potential.fourier(0.5, (0.3,), (0.4,))
    a = spectral_triple(q, 16)
    b = spectral_triple(shift(q, 2.5), 16, a.steps)
    assert np.allclose(b.mu, a.mu + 2.5, rtol=1e-12)
    assert np.allclose(b.kappa, a.kappa, atol=1e-8)
    assert np.allclose(b.alpha, a.alpha, atol=1e-8)


def test_reflection_flips_kappa_and_alpha():
    q = Potential.grid([0.0, 1.0, 3.0, -1.0])
    a = spectral_triple(q, 16)
    b = spectral_triple(reflect(q), 16, a.steps)
    assert np.allclose(b.mu, a.mu, rtol=1e-12)
    assert np.allclose(b.kappa, -a.kappa, atol=1e-8)
    assert np.allclose(b.alpha, -a.alpha, atol=1e-8)


def test_alpha_in_weighted_l2():
    t = spectral_triple(Potential.grid([0.0, 1.0]), 64)
    n = np.arange(1, 65)
    partial = np.cumsum(n**2 * t.alpha**2)
    assert (partial[-1] - partial[47]) / partial[-1] < 0.1
    assert np.max(n * np.abs(t.alpha)) < 1.0


def test_sigma_partial_sums_bounded():
    t = spectral_triple(Potential.fourier(0.5, (0.3,), (0.4,)), 64)
    partial = np.cumsum(t.sigma**2)
    assert partial[-1] - partial[31] < 0.1 * partial[-1] + 1e-12


def test_spectral_json_round_trip():
    t = spectral_triple(Potential.fourier(0.5, (0.3,), (0.4,)), 8)
    d = spectral_from_dict(json.loads(spectral_dumps(t)))
    assert np.array_equal(d["mu"], t.mu) and np.array_equal(d["alpha"], t.alpha)
    assert d["meta"]["steps"] == t.steps


@pytest.mark.parametrize(
    "obj",
    [{"mu": [1.0]}, {"mu": [1.0], "alpha": [0.0], "junk": 1}, {"mu": ["x"], "alpha": [0.0]}, {"mu": [1], "alpha": [0], "c": "a"}, [1]],
)
def test_spectral_json_rejects(obj):
    with pytest.raises(FormatError):
        spectral_from_dict(obj)


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-5, 5))
def test_triple_invariants(mean, a, b, delta):
    q = Potential.fourier(mean, (a,), (b,))
    t = spectral_triple(q, 12)
    assert np.all(np.diff(t.mu) > 0) and np.all(t.norming > 0)
    assert certify(q, t.mu, t.steps).all()
    s = spectral_triple(shift(q, delta), 12, t.steps)
    assert np.allclose(s.mu, t.mu + delta, rtol=1e-11, atol=1e-9)
    assert np.allclose(s.alpha, t.alpha, atol=1e-8)
