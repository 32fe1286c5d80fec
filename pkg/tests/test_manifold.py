import math

import numpy as np
import pytest

from ineq_forge.errors import DimensionError, DomainError, ParseError
from ineq_forge.manifold import (ball_volume, builtin_manifold, c1_limit, check_conditions,
                                 custom_manifold, kernel_on_radius, parse_warping, phi,
                                 phi_inverse, phi_inverse_array, sphere_area, taylor_a3,
                                 unit_ball_volume)


def test_sphere_and_ball():
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert sphere_area(2) == pytest.approx(2 * math.pi)


def test_warping_values(h3, bad_model):
    assert h3.psi(1.0) == pytest.approx(math.sinh(1))
    assert h3.dpsi(1.0, 1) == pytest.approx(math.cosh(1))
    e4 = builtin_manifold("euclidean", 4)
    assert e4.psi(2.0) == 2.0 and e4.dpsi(2.0, 2) == 0.0
    assert bad_model.psi(1.2) == pytest.approx(0.43968, abs=1e-12)


def test_validity_is_enforced(bad_model):
    with pytest.raises(DomainError):
        phi(bad_model, 1.3)
    with pytest.raises(DomainError):
        check_conditions(bad_model, 2.0, (0.01, 2.0, 50))


@pytest.mark.parametrize("kind, N, t, expected", [
    ("euclidean", 5, 2.0, 32.0),
    ("hyperbolic", 3, 1.0, 0.75 * math.sinh(2) - 1.5),
    ("hyperbolic", 2, 1.0, 2 * (math.cosh(1) - 1)),
])
def test_phi_closed_forms(kind, N, t, expected):
    assert phi(builtin_manifold(kind, N), t) == pytest.approx(expected, rel=1e-13)


def test_phi_against_quadrature():
    from scipy.integrate import quad

    for N in range(2, 9):
        m = builtin_manifold("hyperbolic", N)
        for t in (1e-3, 0.3, 2.0, 7.0):
            oracle = N * quad(lambda r: math.sinh(r) ** (N - 1), 0, t, epsabs=0, epsrel=1e-13)[0]
            assert phi(m, t) == pytest.approx(oracle, rel=1e-11)


def test_ball_volume(h3, r3):
    assert ball_volume(r3, 1.0) == pytest.approx(4 * math.pi / 3)
    assert ball_volume(h3, 1.0) == pytest.approx(5.1108, rel=1e-4)
    assert ball_volume(h3, 0.0) == 0.0


def test_phi_monotone_and_inverse(h3):
    ts = np.linspace(0.0, 6.0, 200)
    values = phi(h3, ts)
    assert values[0] == 0.0 and np.all(np.diff(values) > 0)
    for t in ts[1::17]:
        assert phi_inverse(h3, float(phi(h3, t))) == pytest.approx(t, abs=1e-10)
    back = phi_inverse_array(h3, values)
    assert np.allclose(back, ts, atol=1e-10, rtol=1e-12)


def test_phi_below_sinh_power():
    for N in (3, 4, 5):
        m = builtin_manifold("hyperbolic", N)
        ts = np.linspace(0.05, 5, 50)
        assert np.all(phi(m, ts) < np.sinh(ts) ** N)


def test_taylor_a3(h3, r3, bad_model):
    assert taylor_a3(h3) == pytest.approx(1 / 6)
    assert taylor_a3(bad_model) == pytest.approx(1.0)
    assert taylor_a3(r3) == 0.0
    N = 3
    assert 6 * (N - 1) * taylor_a3(h3) / (N + 2) == pytest.approx((N - 1) / (N + 2))


def test_c1_limit(h3, r3, bad_model):
    assert c1_limit(h3) == pytest.approx(1.0)
    assert c1_limit(r3) == 0.0
    with pytest.raises(DomainError):
        c1_limit(bad_model)


def _by_id(reports):
    return {r.condition_id: r for r in reports}


def test_conditions_hyperbolic_all_pass(h3):
    reports = check_conditions(h3, 2.0, (0.01, 10.0, 500))
    assert all(r.passed for r in reports)


def test_conditions_counterexample(bad_model):
    reports = _by_id(check_conditions(bad_model, 2.0, (0.01, 1.25, 500)))
    kp = reports["kernel_positive"]
    assert not kp.passed
    assert 1.0 <= kp.witness[0] <= 1.25 and kp.witness[1] < -1
    again = _by_id(check_conditions(bad_model, 2.0, (0.01, 1.25, 500)))
    assert again["kernel_positive"].witness == kp.witness


def test_conditions_euclidean_non_strict(r3):
    reports = _by_id(check_conditions(r3, 2.0, (0.01, 10.0, 100)))
    assert reports["regularity"].passed and reports["convexity"].passed
    assert not reports["kernel_positive"].passed


def test_kernel_on_radius_counterexample(bad_model):
    assert kernel_on_radius(bad_model, 2.0, 1.2) < -1


def test_parse_warping():
    assert parse_warping("sinh", 3).is_hyperbolic
    assert parse_warping("id", 4).is_euclidean
    poly = parse_warping("poly:1,0,1,0,-1", 3)
    assert poly.validity == (0.0, 1.27)
    assert parse_warping("sinh:2", 3).psi(1.0) == pytest.approx(math.sinh(2) / 2)
    with pytest.raises(ParseError):
        parse_warping("cosh", 3)
    with pytest.raises(DimensionError):
        parse_warping("sinh", 1)


def test_custom_manifold_matches_builtin(h3):
    m = custom_manifold(3, np.sinh, label="sinh-custom")
    assert taylor_a3(m) == pytest.approx(1 / 6, rel=1e-5)
    assert phi(m, 1.5) == pytest.approx(phi(h3, 1.5), rel=1e-9)
