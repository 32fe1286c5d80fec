import math

import numpy as np
import pytest

from ineq_forge.constants import gaussian_c2
from ineq_forge.errors import RangeError
from ineq_forge.gaussmeasure import (GaussianMeasure, dirichlet_dm, dm_integral, entropy_dm,
                                     lp_dm, potential_bracket, potential_term, rho_coth_minus_one)
from ineq_forge.manifold import builtin_manifold
from ineq_forge.profiles import RadialProfile, parse_profile
from ineq_forge.rearrange import radial_integral


@pytest.fixture(scope="module")
def gm3():
    return GaussianMeasure.build(3)


def _ramp():
    return RadialProfile("rho", lambda r: np.asarray(r, dtype=float),
                         lambda r: np.ones_like(np.asarray(r, dtype=float)), "none", 0.0, False)


@pytest.mark.parametrize("N", range(2, 9))
def test_probability_measure(N):
    gm = GaussianMeasure.build(N)
    assert dm_integral(lambda r: np.ones_like(r), gm).value == pytest.approx(1.0, abs=1e-8)
    assert gm.G == pytest.approx(GaussianMeasure.build(N, "quadrature").G, rel=1e-8)


def test_moments_against_direct_quadrature(gm3):
    h3 = builtin_manifold("hyperbolic", 3)
    second = dm_integral(lambda r: r ** 2, gm3).value
    oracle = radial_integral(lambda r: r ** 2 * np.exp(-r ** 2 / 2), h3).value / gm3.G
    assert second == pytest.approx(oracle, rel=1e-10)
    assert math.isfinite(dm_integral(np.exp, gm3).value)


def test_bracket_pieces(gm3):
    assert rho_coth_minus_one(0.0) == 0.0
    assert rho_coth_minus_one(1e-4) == pytest.approx(1e-8 / 3, rel=1e-6)
    assert rho_coth_minus_one(2.0) == pytest.approx(2 / math.tanh(2) - 1)
    const = potential_term(gm3, parse_profile("const:1")).value
    mean = dm_integral(rho_coth_minus_one, gm3).value
    assert const == pytest.approx(2 * mean - 0.9 * 2 + math.log(gaussian_c2(3)), rel=1e-10)
    with pytest.raises(RangeError):
        potential_bracket(2, 1.0)


def test_bracket_on_compact_support(gm3):
    u = parse_profile("bump:1")
    value = potential_term(gm3, u).value
    top = float(np.max(np.abs(potential_bracket(3, np.linspace(0, 1, 101)))))
    assert abs(value) <= top * lp_dm(u, gm3, 2).value + 1e-12


def test_dirichlet(gm3):
    assert dirichlet_dm(parse_profile("const:2"), gm3).value == 0.0
    assert dirichlet_dm(_ramp(), gm3).value == pytest.approx(1.0, abs=1e-10)
    expected = dm_integral(lambda r: np.exp(-2 * r), gm3).value
    assert dirichlet_dm(parse_profile("expdecay:1"), gm3).value == pytest.approx(expected, rel=1e-10)


def test_entropy_scaling(gm3):
    u = parse_profile("gauss:0.3")
    e1, _ = entropy_dm(u, gm3)
    e2, _ = entropy_dm(u.scaled(2.0), gm3)
    assert e2 == pytest.approx(4 * e1, rel=1e-9)
    assert entropy_dm(parse_profile("const:3"), gm3)[0] == pytest.approx(0.0, abs=1e-12)
