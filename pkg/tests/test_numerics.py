import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ineq_forge import numerics
from ineq_forge.errors import BracketError, NonFinite, RangeError
from ineq_forge.numerics import QuadratureConfig


@pytest.mark.parametrize("f, expected", [
    (lambda r: np.exp(-2 * r), 0.5),
    (lambda r: np.exp(-r ** 2 / 2), math.sqrt(math.pi / 2)),
    (lambda r: r * np.exp(-4 * r), 1 / 16),
])
def test_semi_infinite_closed_forms(f, expected):
    res = numerics.integrate_semi_infinite(f)
    assert res.value == pytest.approx(expected, rel=1e-10)
    assert res.error_estimate >= 0


def test_interval_polynomial_exact():
    res = numerics.integrate_interval(lambda x: 3 * x ** 2, 0.0, 2.0)
    assert res.value == pytest.approx(8.0, rel=1e-13)


def test_algebraic_tail():
    res = numerics.integrate_semi_infinite(lambda r: 1 / (1 + r ** 2), decay="algebraic")
    assert res.value == pytest.approx(math.pi / 2, rel=1e-9)


def test_real_line_log_map():
    res = numerics.integrate_real_line_log(lambda s: 1 / (1 + s) ** 2)
    assert res.value == pytest.approx(1.0, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(0.5, 4))
def test_semi_infinite_linearity(a, b, c):
    f = lambda r: np.exp(-c * r)
    g = lambda r: r * np.exp(-r)
    rf, rg = numerics.integrate_semi_infinite(f), numerics.integrate_semi_infinite(g)
    both = numerics.integrate_semi_infinite(lambda r: a * f(r) + b * g(r))
    slack = 2 * (abs(a) * rf.error_estimate + abs(b) * rg.error_estimate + both.error_estimate)
    assert abs(both.value - (a * rf.value + b * rg.value)) <= slack + 1e-12


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFinite):
        numerics.integrate_interval(lambda x: np.where(x < 0.5, np.nan, 1.0), 0.0, 1.0)


def test_bad_config():
    with pytest.raises(RangeError):
        QuadratureConfig(rel_tol=0)


@pytest.mark.parametrize("f, x, order, expected", [
    (np.sinh, 0.0, 3, 1.0),
    (lambda t: t + t ** 3 - t ** 5, 0.0, 3, 6.0),
    (np.sinh, 1.0, 1, math.cosh(1)),
    (np.cosh, 0.7, 2, math.cosh(0.7)),
])
def test_differentiate(f, x, order, expected):
    assert numerics.differentiate(f, x, order) == pytest.approx(expected, rel=1e-7, abs=1e-9)


def test_invert_monotone_examples():
    phi3 = lambda t: 0.75 * np.sinh(2 * t) - 1.5 * t
    assert numerics.invert_monotone(phi3, float(phi3(1.0)), (0, 5)) == pytest.approx(1.0, abs=1e-9)
    assert numerics.invert_monotone(lambda t: t ** 3, 8.0, (0, 5)) == pytest.approx(2.0, abs=1e-12)
    assert numerics.invert_monotone(lambda t: t ** 3, 0.0, (0, 5)) == 0.0


def test_invert_monotone_bracket_error():
    with pytest.raises(BracketError):
        numerics.invert_monotone(lambda t: t, 10.0, (0, 1))


@settings(max_examples=25, deadline=None)
@given(x=st.floats(0.01, 4))
def test_invert_round_trip(x):
    f = lambda t: np.sinh(t) + t
    assert numerics.invert_monotone(f, float(f(x)), (0, 10)) == pytest.approx(x, abs=1e-10)


@pytest.mark.parametrize("f, grid, expected", [
    (lambda t: (t - 2) ** 2, (0, 5, 101), (2.0, 0.0)),
    (np.cosh, (-1, 1, 51), (0.0, 1.0)),
])
def test_minimize_scalar(f, grid, expected):
    x, v = numerics.minimize_scalar(f, grid)
    assert x == pytest.approx(expected[0], abs=1e-6)
    assert v == pytest.approx(expected[1], abs=1e-10)


def test_erf_values():
    assert numerics.erf(0.0) == 0.0
    assert numerics.erf(1.0) == pytest.approx(0.8427007929497149, abs=1e-12)
    xs = np.linspace(-3, 3, 61)
    ys = numerics.erf(xs)
    assert np.all(np.diff(ys) > 0)
    assert np.array_equal(ys + numerics.erf(-xs), np.zeros_like(xs))
