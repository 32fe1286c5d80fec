import math

import numpy as np
import pytest

from ineq_forge.errors import ParseError
from ineq_forge.profiles import parse_profile


@pytest.mark.parametrize("spec, rho, expected", [
    ("gauss:2", 0.5, math.exp(-0.5)),
    ("expdecay:3", 1.0, math.exp(-3)),
    ("bump:2", 1.0, 0.5625),
    ("powexp:2,3", 1.0, math.exp(-3)),
    ("bubble:2,1", 1.0, 0.5),
    ("const:2.5", 7.0, 2.5),
    ("1+gauss:1", 0.0, 2.0),
])
def test_values(spec, rho, expected):
    assert float(parse_profile(spec)(rho)) == pytest.approx(expected)


@pytest.mark.parametrize("spec", ["gauss:0.7", "expdecay:2", "bump:1.5", "powexp:2,3",
                                  "bubble:2,1.5", "0.5+expdecay:2"])
def test_derivative_matches_difference(spec):
    u = parse_profile(spec)
    rho = np.array([0.3, 0.9, 1.3])
    h = 1e-6
    fd = (u(rho + h) - u(rho - h)) / (2 * h)
    assert np.allclose(u.derivative(rho), fd, rtol=1e-6, atol=1e-8)


def test_monotonicity_flags():
    assert parse_profile("gauss:1").nonincreasing
    assert not parse_profile("powexp:2,3").nonincreasing
    assert parse_profile("powexp:2,3").supremum == pytest.approx((2 / 3) ** 2 * math.exp(-2))


def test_shift_keeps_tail_but_lifts_floor():
    u = parse_profile("1+bump:1")
    assert u.floor == 1.0 and math.isinf(u.support_radius)


def test_table_profile(tmp_path):
    path = tmp_path / "u.csv"
    rows = "\n".join(f"{r},{max(0.0, 1 - r / 5) ** 2}" for r in np.linspace(0, 5, 51))
    path.write_text("rho,value\n" + rows + "\n")
    u = parse_profile(f"table:{path}")
    assert float(u(1.0)) == pytest.approx(0.64, rel=1e-3)
    assert u.nonincreasing


@pytest.mark.parametrize("spec", ["nope", "gauss", "gauss:-1", "x+gauss:1", "bump:1,2"])
def test_bad_specs(spec):
    with pytest.raises(ParseError):
        parse_profile(spec)
