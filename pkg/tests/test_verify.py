import math

import pytest

from ineq_forge.constants import ExponentParams as E
from ineq_forge.errors import (ConditionViolated, DomainError, LogArgumentNonpositive,
                               RangeError)
from ineq_forge.manifold import builtin_manifold, parse_warping
from ineq_forge.profiles import indicator, parse_profile as P
from ineq_forge.rearrange import gradient_decomposition
from ineq_forge.reports import REPORT_FIELDS
from ineq_forge.verify import (InequalityId, SkippedItem, holder_entropy_bound, verify,
                               verify_suite)


def _hyp(N):
    return builtin_manifold("hyperbolic", N)


def test_poincare_closed_form(h3):
    r = verify("poincare", P("expdecay:2"), h3, E(3, 2))
    assert r.lhs == pytest.approx(math.pi / 6, rel=1e-10)
    assert r.rhs == pytest.approx(2 * math.pi / 3, rel=1e-10)
    assert r.deficit == pytest.approx(math.pi / 2, rel=1e-10)
    assert r.deficit == r.rhs - r.lhs and r.passed and not r.normalized


@pytest.mark.parametrize("a", [1.0, 0.25, 0.0625])
@pytest.mark.parametrize("N", [3, 4])
def test_euclidean_log_sobolev_gaussian_equality(a, N):
    m = builtin_manifold("euclidean", N)
    r = verify("euclidean_log_sobolev", P(f"gauss:{a}"), m, E(N, 2))
    sigma2 = 1 / (4 * a)
    closed = -(N / 4) * (math.log(2 * math.pi * sigma2) + 1)
    assert r.lhs == pytest.approx(closed, rel=1e-9)
    assert abs(r.deficit) <= 1e-6 and r.normalized


def test_gn_extremal_equality(r3):
    r = verify("gn_poincare", P("bubble:2,1"), r3, E(3, 2, alpha=2))
    assert abs(r.deficit) / r.rhs <= 1e-6


@pytest.mark.parametrize("iid, N, params", [
    ("poincare_sobolev_lambda", 3, E(3, 2)),
    ("poincare_sobolev_lambda", 4, E(4, 3)),
    ("poincare_sobolev_sharp", 5, E(5, 3)),
    ("hebey_sobolev", 4, E(4, 2)),
    ("gn_poincare", 3, E(3, 2, alpha=1.5)),
    ("gn_poincare", 3, E(3, 2, alpha=0.5)),
    ("log_sobolev", 3, E(3, 2)),
    ("log_sobolev", 4, E(4, 2.5)),
    ("log_sobolev_2", 5, E(5, 2)),
    ("holder_entropy", 3, E(3, 2, s=6)),
    ("gaussian_log_sobolev", 3, E(3, 2)),
    ("gaussian_poincare", 3, E(3, 1)),
    ("gaussian_poincare_general", 3, E(3, 1.5)),
    ("beckner_family", 3, E(3, 2, alpha=0.5, q=3, s=1)),
    ("beckner_lambda", 3, E(3, 2, lam=1.0)),
    ("model_log_sobolev_2", 4, E(4, 2)),
    ("model_log_sobolev_p", 4, E(4, 2.5)),
    ("extended_beckner", 3, E(3, 1, q=2, alpha=1)),
    ("gamma_log_sobolev", 3, E(3, 2, alpha=1)),
])
def test_nonnegative_deficits(iid, N, params):
    u = P("1+gauss:1") if iid in ("extended_beckner", "gamma_log_sobolev") else P("gauss:1")
    r = verify(iid, u, _hyp(N), params)
    assert r.id == iid
    assert r.deficit >= -r.tolerance
    assert r.quad_error >= 0


@pytest.mark.parametrize("iid", ["log_sobolev", "log_sobolev_2"])
@pytest.mark.parametrize("c", [0.5, 3.0])
def test_log_forms_are_scale_invariant(h3, iid, c):
    base = verify(iid, P("gauss:1"), h3, E(3, 2))
    scaled = verify(iid, P("gauss:1").scaled(c), h3, E(3, 2))
    assert scaled.lhs == pytest.approx(base.lhs, abs=1e-9)
    assert scaled.rhs == pytest.approx(base.rhs, abs=1e-9)
    assert scaled.scale == pytest.approx(c * base.scale)


def test_lambda_echoed(h3):
    r = verify("log_sobolev_2", P("gauss:1"), h3, E(3, 2))
    assert r.params.lam == pytest.approx(0.9)
    assert r.to_dict()["lambda"] == pytest.approx(0.9)


def test_sobolev_rhs_dominates_euclidean_energy(h3):
    u = P("expdecay:2")
    r = verify("poincare_sobolev_lambda", u, h3, E(3, 2))
    assert r.rhs >= gradient_decomposition(u, h3, 2).euclidean_term - 1e-6


def test_gaussian_poincare_general_at_two(h3):
    r = verify("gaussian_poincare_general", P("gauss:0.7"), h3, E(3, 2))
    assert (r.lhs, r.rhs, r.deficit) == (0.0, 0.0, 0.0)


def test_beckner_lambda_small(h3):
    r = verify("beckner_lambda", P("gauss:0.3"), h3, E(3, 2, lam=1e-6))
    assert abs(r.deficit) <= 1e-4


def test_beckner_family_constraint(h3):
    with pytest.raises(RangeError):
        verify("beckner_family", P("gauss:1"), h3, E(3, 2, alpha=0.5, q=3, s=1, b=0.7))


def test_gaussian_method_switch(h3):
    a = verify("gaussian_log_sobolev", P("gauss:0.3"), h3, E(3, 2))
    b = verify("gaussian_log_sobolev", P("gauss:0.3"), h3, E(3, 2), gaussian_method="quadrature")
    assert a.deficit == pytest.approx(b.deficit, rel=1e-8)


def test_holder_entropy():
    m = builtin_manifold("euclidean", 3)
    r = holder_entropy_bound(P("bump:1"), _hyp(3), 2, 6)
    assert r.deficit >= 0
    # unit-volume ball: every L^q norm of its indicator equals 1
    ind = holder_entropy_bound(indicator((3 / (4 * math.pi)) ** (1 / 3)), m, 2, 4)
    assert ind.rhs == pytest.approx(0.0, abs=1e-12) and ind.lhs <= 1e-12
    with pytest.raises(RangeError):
        holder_entropy_bound(P("gauss:1"), m, 2, 2)


def test_holder_entropy_expdecay(h3):
    assert holder_entropy_bound(P("expdecay:2"), h3, 2, 6).deficit >= 0


@pytest.mark.parametrize("iid, m, params, exc", [
    ("hebey_sobolev", _hyp(3), E(3, 2), RangeError),
    ("poincare", builtin_manifold("euclidean", 3), E(3, 2), DomainError),
    ("poincare_sobolev_sharp", _hyp(4), E(4, 2), RangeError),
    ("log_sobolev", _hyp(3), E(3, 1.5), RangeError),
    ("model_log_sobolev_2", builtin_manifold("counterexample", 3), E(3, 2), ConditionViolated),
    ("poincare", _hyp(3), E(4, 2), RangeError),
])
def test_refusals(iid, m, params, exc):
    with pytest.raises(exc):
        verify(iid, P("gauss:1"), m, params)


def test_log_argument_guard():
    # an indicator carries no gradient energy, so the bracket is -lambda
    with pytest.raises(LogArgumentNonpositive):
        verify("log_sobolev_2", indicator(1.0), _hyp(3), E(3, 2))


def test_suite_order_and_skips(h3):
    profiles = [P("gauss:0.5"), P("gauss:1"), P("gauss:2")]
    out = verify_suite(["log_sobolev_2"], profiles, h3, [E(3, 2)])
    assert [r.profile for r in out] == [u.label for u in profiles]
    assert all(r.deficit >= -1e-8 for r in out)
    skipped = verify_suite(["poincare"], profiles[:1], builtin_manifold("euclidean", 3), [E(3, 2)])
    assert isinstance(skipped[0], SkippedItem) and "hyperbolic" in skipped[0].reason
    assert verify_suite(["poincare"], [], h3, [E(3, 2)]) == []


def test_suite_threads_keep_order(h3):
    ids = ["poincare", "log_sobolev_2"]
    profiles = [P("gauss:1"), P("expdecay:3")]
    grid = [E(3, 2), E(3, 2.5)]
    serial = verify_suite(ids, profiles, h3, grid)
    threaded = verify_suite(ids, profiles, h3, grid, workers=4)
    assert [e.to_dict() for e in serial] == [e.to_dict() for e in threaded]


def test_report_schema(h3):
    d = verify("beckner_lambda", P("gauss:0.3"), h3, E(3, 2, lam=1.0)).to_dict()
    assert list(d) == [f for f in REPORT_FIELDS if f in d]
    assert {"id", "manifold", "N", "p", "profile", "lhs", "rhs", "deficit", "quad_error",
            "normalized"} <= set(d)


def test_every_id_has_a_handler():
    from ineq_forge.verify import _HANDLERS

    assert set(_HANDLERS) == set(InequalityId)
