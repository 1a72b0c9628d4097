import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import cumulative_trapezoid, quad

from asymspec import (
    Potential,
    PoleError,
    asym_eval,
    asym_leading,
    dtn,
    dtn_commutator_norm,
    odd_identity_residual,
    spectral_triple,
    symmetry_test,
)
from asymspec.asymmetry import asym_csv, leading_by_quadrature, sample_asymmetry
from asymspec.potential import evaluate, odd_part, reflect
from conftest import linear_fn
from oracles import ode_fundamental

PI2 = math.pi**2
FAMILY = [Potential.grid([0.0, 1.0]), Potential.fourier(0.0, (), (1.0,)), Potential.fourier(0.5, (0.3,), (0.4,))]


def test_symmetric_potential_has_zero_asymmetry():
    q = Potential.fourier(1.0, (0.7, -0.2))
    lam = np.linspace(-30, 5000, 50)
    assert np.max(np.abs(asym_eval(q, lam))) <= 1e-9


def test_free_asymmetry():
    assert abs(asym_eval(Potential.zero(), 17.3)) <= 1e-12


def test_linear_asymmetry_against_oracle():
    ref = ode_fundamental(linear_fn, PI2)
    assert asym_eval(Potential.grid([0.0, 1.0]), PI2, 4096) == pytest.approx(0.5 * (ref[0] - ref[3]), abs=1e-9)


@pytest.mark.parametrize("q", FAMILY)
def test_reflection_antisymmetry(q):
    lam = np.linspace(-20, 3000, 40)
    assert np.max(np.abs(asym_eval(reflect(q), lam, 512) + asym_eval(q, lam, 512))) <= 1e-9


def test_real_for_real_lambda():
    s = sample_asymmetry(FAMILY[2], np.linspace(0, 100, 5) + 0j)
    assert np.max(np.abs(np.imag(s.values))) <= 1e-12


def test_leading_term_of_single_sine_mode():
    # q = sin(2 pi x): only n = 1 survives, with value 1 / (4 pi)
    q = Potential.fourier(0.0, (), (1.0,))
    assert asym_leading(q, 1) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
    assert asym_leading(q, 2) == 0.0
    for n in (1, 2, 3):
        assert leading_by_quadrature(q, n) == pytest.approx(asym_leading(q, n), abs=1e-12)


def test_leading_term_matches_integral_form():
    q = Potential.grid([0.0, 1.0, -2.0, 0.5])
    qo = odd_part(q)
    for n in (1, 2, 5):
        ref = quad(lambda y: math.sin(n * math.pi * y) * evaluate(qo, (y + 1) / 2), -1, 1, limit=200, points=[-1 / 3, 1 / 3])[0]
        assert asym_leading(q, n) == pytest.approx(-ref / (4 * n * math.pi), abs=1e-12)


def test_leading_term_vanishes_for_symmetric():
    q = Potential.grid([1.0, 0.0, 1.0])
    assert all(abs(asym_leading(q, n)) < 1e-14 for n in range(1, 6))


@pytest.mark.parametrize("q", FAMILY)
def test_leading_term_remainder_is_order_n_minus_two(q):
    t = spectral_triple(q, 64)
    n = np.arange(1, 65)
    lead = np.array([asym_leading(q, k) for k in n])
    scaled = np.abs(t.alpha - lead) * n**2
    assert np.all(scaled[16:] <= scaled[3:16].max())


def test_free_dtn():
    n = dtn(Potential.zero(), -1.0).entries
    ref = np.array([[-math.cosh(1), 1], [1, -math.cosh(1)]]) / math.sinh(1)
    assert np.allclose(n, ref, rtol=1e-12)


def test_dtn_pole():
    with pytest.raises(PoleError) as err:
        dtn(Potential.zero(), 4 * PI2)
    assert err.value.nearest == pytest.approx(4 * PI2, rel=1e-10)


def test_linear_dtn_against_oracle():
    c, dc, s, ds = ode_fundamental(linear_fn, 2.0)
    ref = np.array([[-c, 1], [1, -ds]]) / s
    n = dtn(Potential.grid([0.0, 1.0]), 2.0, 4096).entries
    assert np.allclose(n, ref, rtol=1e-8)
    assert np.allclose(n, n.T)


def test_commutator_examples():
    q = FAMILY[2]
    assert dtn_commutator_norm(q, q).norm <= 1e-10
    sym1, sym2 = Potential.fourier(0.3, (1.0,)), Potential.grid([2.0, -1.0, 2.0])
    assert dtn_commutator_norm(sym1, sym2).norm <= 1e-7
    grid = np.linspace(1, 200, 32)
    assert dtn_commutator_norm(FAMILY[0], Potential.zero(), grid).norm > 1e-3


def test_commutator_skips_poles():
    res = dtn_commutator_norm(Potential.zero(), Potential.constant(1.0), [PI2, 2.5 * PI2])
    assert res.skipped == (PI2,)


def test_odd_identity_symmetric():
    assert odd_identity_residual(Potential.fourier(0.3, (0.5,)), 20.0) <= 1e-10


def test_odd_identity_linear():
    q = Potential.grid([0.0, 1.0])
    for lam in (1.0, 10.0, 50.0):
        coarse, fine = odd_identity_residual(q, lam, 4096), odd_identity_residual(q, lam, 8192)
        assert fine <= 1e-7 and coarse / fine >= 3.5


def test_symmetry_test_examples():
    ok, worst = symmetry_test(Potential.constant(5.0))
    assert ok and worst <= 1e-12
    assert symmetry_test(Potential.fourier(0.0, (1.0,)))[0]
    ok, worst = symmetry_test(Potential.grid([0.0, 1.0]))
    assert not ok and worst > 1e-3
    with pytest.raises(ValueError):
        symmetry_test(Potential.zero(), 8)


@pytest.mark.parametrize("q", FAMILY)
def test_weighted_l2_growth_proxy(q):
    """int_0^L |a|^2 sqrt(lam) dlam settles: the last dyadic block adds < 10% at L = 4e4."""
    k = np.linspace(0.0, 200.0, 8001)
    a = asym_eval(q, k**2, 1024)
    cum = cumulative_trapezoid(2 * k * k * a**2, k, initial=0.0)
    half = np.searchsorted(k**2, 2e4)
    assert (cum[-1] - cum[half]) / cum[-1] < 0.1


def test_csv_format():
    text = asym_csv(sample_asymmetry(Potential.zero(), [1.0, 2.5]))
    lines = text.split("\n")
    assert lines[0] == "lambda,a_re,a_im"
    assert lines[1].startswith("1.0,") and text.endswith("\n") and "\r" not in text
    assert len(lines) == 4


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=6), st.floats(-20, 2000))
def test_antisymmetry_property(values, lam):
    q = Potential.grid(values)
    assert abs(asym_eval(reflect(q), lam, 512) + asym_eval(q, lam, 512)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.lists(st.floats(-3, 3), max_size=3), st.floats(-20, 2000))
def test_symmetric_fourier_property(mean, cos, lam):
    assert abs(asym_eval(Potential.fourier(mean, cos), lam, 512)) <= 1e-9
