import math

import numpy as np
import pytest

from ineq_forge import heat
from ineq_forge.errors import RangeError
from ineq_forge.heat import HeatKernelSpec
from ineq_forge.profiles import parse_profile


def test_kernel_values():
    assert heat.heat_kernel_value(3, 0.0, 1.0) == pytest.approx(
        (4 * math.pi) ** -1.5 * math.exp(-1), abs=1e-8)
    closed = (4 * math.pi) ** -1.5 / math.sinh(1) * math.exp(-1 - 0.25)
    assert heat.heat_kernel_value(3, 1.0, 1.0) == pytest.approx(closed, rel=1e-12)
    assert heat.heat_kernel_value(3, 1.0, 1.0) == pytest.approx(0.0054732, abs=1e-6)


@pytest.mark.parametrize("N", heat.SUPPORTED_DIMS)
def test_series_and_closed_form_agree(N):
    # the two evaluation routes meet at rho = 0.5
    below = heat.heat_kernel_value(N, np.array([0.5 - 1e-9]), 0.8)[0]
    above = heat.heat_kernel_value(N, np.array([0.5 + 1e-9]), 0.8)[0]
    assert below == pytest.approx(above, rel=1e-7)


@pytest.mark.parametrize("N, t, tol", [(3, 0.25, 1e-6), (3, 0.5, 1e-6), (3, 1.0, 1e-6),
                                       (3, 2.0, 1e-6), (3, 4.0, 1e-6), (5, 1.0, 1e-4),
                                       (7, 1.0, 1e-4)])
def test_mass_conservation(N, t, tol):
    assert heat.heat_normalization(HeatKernelSpec(N, t)) == pytest.approx(1.0, abs=tol)


def test_positive_and_decreasing():
    rho = np.linspace(0, 8, 200)
    p = heat.heat_kernel_value(3, rho, 1.0)
    assert np.all(p > 0) and np.all(np.diff(p) < 0)


def test_pde_residual():
    assert heat.heat_pde_residual(HeatKernelSpec(3)) <= 1e-4
    assert heat.heat_pde_residual(HeatKernelSpec(5)) <= 1e-3
    point = heat.heat_pde_residual(HeatKernelSpec(3), (1.0, 1.0), (1.0, 1.0), (1, 1), "symbolic")
    assert point <= 1e-6
    assert heat.heat_pde_residual(HeatKernelSpec(3), counts=(0, 0)) == 0.0


@pytest.mark.parametrize("s, t", [(0.5, 0.5), (0.3, 0.7), (1.0, 1.0)])
def test_chapman_kolmogorov(s, t):
    lhs, rhs = heat.chapman_kolmogorov_origin(HeatKernelSpec(3), s, t)
    assert lhs == pytest.approx(rhs, rel=1e-5)


def test_chapman_kolmogorov_small_time():
    lhs, _ = heat.chapman_kolmogorov_origin(HeatKernelSpec(3), 1e-3, 1.0)
    assert lhs == pytest.approx(heat.heat_kernel_value(3, 0.0, 1.001), rel=1e-2)


def test_semigroup_at_origin():
    spec = HeatKernelSpec(3)
    assert heat.semigroup_apply_origin(parse_profile("const:1"), spec) == pytest.approx(1, abs=1e-6)
    for spec_text in ("expdecay:1", "bump:2"):
        assert 0 < heat.semigroup_apply_origin(parse_profile(spec_text), spec) < 1


def test_unsupported_dimension():
    with pytest.raises(RangeError):
        HeatKernelSpec(4)


@pytest.mark.parametrize("q, p", [(2, 1), (2, 1.5), (3, 2)])
@pytest.mark.parametrize("alpha", [0.5, 1.0])
@pytest.mark.parametrize("profile", ["1+expdecay:1", "1+gauss:1", "0.5+bump:2"])
def test_extended_beckner(q, p, alpha, profile):
    r = heat.verify_extended_beckner(parse_profile(profile), HeatKernelSpec(3, 1.0, alpha), p, q)
    assert r.deficit >= -1e-6


def test_extended_beckner_degenerate_cases():
    spec = HeatKernelSpec(3)
    same = heat.verify_extended_beckner(parse_profile("1+expdecay:1"), spec, 2, 2)
    assert same.lhs == 0.0 and same.rhs == 0.0
    flat = heat.verify_extended_beckner(parse_profile("const:2"), spec, 1, 2)
    assert flat.rhs == 0.0 and flat.lhs == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(RangeError):
        heat.verify_extended_beckner(parse_profile("expdecay:1"), spec, 1, 2)


def test_gamma_log_sobolev():
    spec = HeatKernelSpec(3)
    r = heat.verify_gamma_log_sobolev(parse_profile("const:2"), spec)
    assert r.lhs == pytest.approx(4 * math.log(4), rel=1e-9)
    assert r.deficit == pytest.approx(0.0, abs=1e-8)
    for alpha in (1.0, 2.0):
        r = heat.verify_gamma_log_sobolev(parse_profile("1+expdecay:1"), HeatKernelSpec(3, 1.0, alpha))
        assert r.deficit >= 0


def test_log_sobolev_is_beckner_limit():
    f = parse_profile("1+expdecay:1")
    spec = HeatKernelSpec(3)
    eps = 1e-3
    beckner = heat.verify_extended_beckner(f, spec, 2 - eps, 2)
    gls = heat.verify_gamma_log_sobolev(f, spec)
    assert beckner.deficit / eps == pytest.approx(gls.deficit / 2, rel=0.05)
