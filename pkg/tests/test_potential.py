import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from asymspec import DomainError, FormatError, Potential
from asymspec.potential import (
    cell_averages,
    dumps,
    evaluate,
    even_part,
    from_dict,
    integral,
    l2_distance,
    l2_norm,
    loads,
    odd_part,
    reflect,
    shift,
)
from oracles import cell_average_oracle

coeffs = st.lists(st.floats(-3, 3, allow_nan=False), max_size=4)
values = st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=12)


@st.composite
def potentials(draw):
    basis = draw(st.sampled_from(["fourier", "grid", "piecewise"]))
    if basis == "fourier":
        return Potential.fourier(draw(st.floats(-5, 5)), draw(coeffs), draw(coeffs))
    return Potential(basis, grid_values=draw(values))


def test_evaluate_examples():
    assert evaluate(Potential.zero(), 0.3) == 0.0
    assert evaluate(Potential.constant(0.5), 0.9) == 0.5
    assert evaluate(Potential.fourier(0.25, (), (1.0,)), 0.25) == pytest.approx(1.25, abs=1e-15)


def test_evaluate_grid_and_piecewise():
    g = Potential.grid([0.0, 1.0, 4.0])
    assert evaluate(g, 0.25) == pytest.approx(0.5)
    assert evaluate(g, 0.75) == pytest.approx(2.5)
    p = Potential.piecewise([1.0, 2.0])
    # left-closed cells, last cell owns x = 1
    assert evaluate(p, 0.5) == 2.0
    assert evaluate(p, 0.4999) == 1.0
    assert evaluate(p, 1.0) == 2.0


@pytest.mark.parametrize("x", [-0.1, 1.5, float("nan")])
def test_evaluate_outside_domain(x):
    with pytest.raises(DomainError):
        evaluate(Potential.zero(), x)


def test_reflect_examples():
    sym = Potential.fourier(1.0, (0.3, 0.2))
    assert reflect(sym) == sym
    assert reflect(Potential.fourier(0.0, (), (1.0,))).sin_coeffs == (-1.0,)
    assert reflect(Potential.grid([1, 2, 5])).grid_values == (5.0, 2.0, 1.0)


def test_reflect_pointwise():
    q = Potential.fourier(0.2, (0.5, -0.1), (0.7, 0.3))
    x = np.linspace(0, 1, 11)
    assert np.allclose(evaluate(reflect(q), x), evaluate(q, 1 - x), atol=1e-14)


def test_odd_part_examples():
    sym = Potential.fourier(2.0, (1.0,))
    assert l2_norm(odd_part(sym)) == 0.0
    g = Potential.grid(np.linspace(0, 1, 9))
    assert np.allclose(odd_part(g).grid_values, np.linspace(0, 1, 9) - 0.5, atol=1e-15)


def test_shift_examples():
    q = shift(Potential.zero(), math.pi**2)
    assert q == Potential.constant(math.pi**2)
    g = Potential.grid([0.3, 1.7, -2.0])
    back = shift(shift(g, 1.234), -1.234)
    assert np.allclose(back.grid_values, g.grid_values, atol=1e-15)


def test_l2_norm_examples():
    assert l2_norm(Potential.zero()) == 0.0
    assert l2_norm(Potential.constant(-3.0)) == 3.0
    assert l2_norm(Potential.fourier(0, (), (1,))) == pytest.approx(1 / math.sqrt(2), rel=1e-15)


@pytest.mark.parametrize("q", [Potential.grid([0.0, 2.0, -1.0, 0.5]), Potential.piecewise([1.0, -2.0, 3.0])])
def test_l2_norm_against_quadrature(q):
    brk = np.linspace(0, 1, 4)[1:-1]
    ref = math.sqrt(quad(lambda x: evaluate(q, x) ** 2, 0, 1, points=brk, epsabs=1e-14)[0])
    assert l2_norm(q) == pytest.approx(ref, rel=1e-12)


def test_l2_distance_and_integral():
    p = Potential.fourier(1.0, (0.5,), ())
    q = Potential.fourier(1.0, (), (0.5,))
    assert l2_distance(p, q) == pytest.approx(0.5, rel=1e-14)
    assert l2_distance(Potential.grid([0, 1]), Potential.fourier(0.5)) == pytest.approx(math.sqrt(1 / 12), rel=1e-9)
    assert integral(Potential.grid([0, 1])) == pytest.approx(0.5)
    assert integral(Potential.fourier(0.7, (1.0,), (2.0,))) == 0.7


@pytest.mark.parametrize(
    "q",
    [
        Potential.fourier(0.3, (0.5, -1.0), (0.2, 0.1)),
        Potential.grid([0.0, 2.0, -1.0, 0.5, 3.0]),
        Potential.piecewise([1.0, -2.0, 3.0]),
    ],
)
def test_cell_averages_against_quadrature(q):
    assert np.allclose(cell_averages(q, 24), cell_average_oracle(lambda x: evaluate(q, x), 24), atol=1e-12)


def test_validation():
    with pytest.raises(DomainError):
        Potential.fourier(float("inf"))
    with pytest.raises(DomainError):
        Potential("fourier", 0.0, (), (), (1.0,))
    with pytest.raises(DomainError):
        Potential.grid([1.0])
    with pytest.raises(DomainError):
        Potential("hermite")


def test_json_round_trip():
    for q in (Potential.fourier(0.5, (0.3,), (0.4,)), Potential.grid([0, 1]), Potential.piecewise([2.0])):
        assert loads(dumps(q)) == q


@pytest.mark.parametrize(
    "text",
    [
        '{"basis":"fourier","mean":0,"cos":[],"sin":[],"extra":1}',
        '{"basis":"grid"}',
        '{"basis":"spline","values":[1,2]}',
        '{"basis":"fourier","cos":["a"]}',
        '{"basis":"fourier","mean":true}',
        '{"basis":"grid","values":[1]}',
        "[1, 2]",
        "{not json",
    ],
)
def test_json_rejects(text):
    with pytest.raises(FormatError):
        loads(text)


def test_from_dict_defaults_to_zero_parts():
    assert from_dict({"basis": "fourier"}) == Potential.zero()


@settings(max_examples=60, deadline=None)
@given(potentials())
def test_reflect_is_involution(q):
    assert reflect(reflect(q)) == q


@settings(max_examples=60, deadline=None)
@given(potentials(), st.floats(0, 1))
def test_odd_plus_even_recombines(q, x):
    total = evaluate(odd_part(q), x) + evaluate(even_part(q), x)
    assert total == pytest.approx(evaluate(q, x), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(potentials(), st.floats(0, 1))
def test_odd_part_of_reflection(q, x):
    assert evaluate(odd_part(reflect(q)), x) == pytest.approx(-evaluate(odd_part(q), x), abs=1e-12)
