"""Evaluate both sides of each inequality on a radial test profile.

Every inequality is put in lhs <= rhs form before evaluation and reported with
deficit = rhs - lhs. Log-type inequalities carry the constraint ||u||_p = 1,
which is imposed by rescaling with the computed norm.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence, Union

from . import gaussmeasure as gmod
from . import heat
from .constants import (ExponentParams, gn_constant, lambda_log, log_sobolev_constant,
                        correction_lower_constant, lambda_from_correction, poincare_constant,
                        sharp_sobolev_constant)
from .errors import (ConditionViolated, DomainError, IneqError, LogArgumentNonpositive,
                     RangeError)
from .manifold import ManifoldModel, check_conditions, taylor_a3
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureResult
from .profiles import RadialProfile
from .rearrange import entropy_integral, grad_lp_integral, lp_integral
from .reports import InequalityReport, power_error


class InequalityId(str, enum.Enum):
    POINCARE = "poincare"
    POINCARE_SOBOLEV_LAMBDA = "poincare_sobolev_lambda"
    POINCARE_SOBOLEV_SHARP = "poincare_sobolev_sharp"
    HEBEY_SOBOLEV = "hebey_sobolev"
    GN_POINCARE = "gn_poincare"
    LOG_SOBOLEV = "log_sobolev"
    LOG_SOBOLEV_2 = "log_sobolev_2"
    EUCLIDEAN_LOG_SOBOLEV = "euclidean_log_sobolev"
    HOLDER_ENTROPY = "holder_entropy"
    GAUSSIAN_LOG_SOBOLEV = "gaussian_log_sobolev"
    GAUSSIAN_POINCARE_GENERAL = "gaussian_poincare_general"
    GAUSSIAN_POINCARE = "gaussian_poincare"
    BECKNER_FAMILY = "beckner_family"
    BECKNER_LAMBDA = "beckner_lambda"
    MODEL_LOG_SOBOLEV_2 = "model_log_sobolev_2"
    MODEL_LOG_SOBOLEV_P = "model_log_sobolev_p"
    EXTENDED_BECKNER = "extended_beckner"
    GAMMA_LOG_SOBOLEV = "gamma_log_sobolev"

    def __str__(self) -> str:
        return self.value


def _report(iid, m, params, u, lhs, rhs, err, normalized=False, scale=None):
    return InequalityReport(str(iid), m.label, params, u.label, float(lhs), float(rhs),
                            float(err), normalized, scale)


def _require(cond: bool, message: str, exc=RangeError):
    if not cond:
        raise exc(message)


def _hyperbolic_only(m: ManifoldModel):
    _require(m.is_hyperbolic, f"{m.label}: this inequality is stated on hyperbolic space only",
             DomainError)


def _bracket(grad: QuadratureResult, lam: float, mass: QuadratureResult) -> tuple[float, float]:
    """||grad u||_p^p - lam ||u||_p^p and its error."""
    value = grad.value - lam * mass.value
    return value, grad.error_estimate + lam * mass.error_estimate


# Individual inequalities.

def _poincare(u, m, par, cfg):
    _hyperbolic_only(m)
    _require(par.p > 1, "Poincare inequality needs p > 1")
    mass = lp_integral(u, m, par.p, cfg)
    grad = grad_lp_integral(u, m, par.p, cfg)
    c = poincare_constant(m.dim, par.p)
    return _report(InequalityId.POINCARE, m, par, u, c * mass.value, grad.value,
                   c * mass.error_estimate + grad.error_estimate)


def _sobolev_form(iid, u, m, par, lam, S, cfg):
    """S^p ||u||_{p*}^p <= ||grad u||_p^p - lam ||u||_p^p."""
    N, p = m.dim, par.p
    ps = N * p / (N - p)
    crit = lp_integral(u, m, ps, cfg)
    mass = lp_integral(u, m, p, cfg)
    grad = grad_lp_integral(u, m, p, cfg)
    lhs = S ** p * crit.value ** (p / ps)
    rhs, rerr = _bracket(grad, lam, mass)
    err = S ** p * power_error(crit.value, crit.error_estimate, p / ps) + rerr
    return _report(iid, m, replace(par, lam=lam), u, lhs, rhs, err)


def _poincare_sobolev_lambda(u, m, par, cfg):
    _hyperbolic_only(m)
    N, p = m.dim, par.p
    _require(2 <= p < N, "needs 2 <= p < N")
    return _sobolev_form(InequalityId.POINCARE_SOBOLEV_LAMBDA, u, m, par, lambda_log(N, p, m),
                         sharp_sobolev_constant(N, p), cfg)


def _poincare_sobolev_sharp(u, m, par, cfg):
    _hyperbolic_only(m)
    N, p = m.dim, par.p
    _require(N >= 4 and 2 * N / (N - 1) <= p < N, "needs N >= 4 and 2N/(N-1) <= p < N")
    return _sobolev_form(InequalityId.POINCARE_SOBOLEV_SHARP, u, m, par, poincare_constant(N, p),
                         sharp_sobolev_constant(N, p), cfg)


def _hebey_sobolev(u, m, par, cfg):
    _hyperbolic_only(m)
    N = m.dim
    _require(N >= 4, "the conformal Sobolev inequality is sharp only for N >= 4")
    _require(par.p == 2, "the conformal Sobolev inequality has p = 2")
    return _sobolev_form(InequalityId.HEBEY_SOBOLEV, u, m, par, N * (N - 2) / 4.0,
                         sharp_sobolev_constant(N, 2), cfg)


def _gn_poincare(u, m, par, cfg):
    N, p, alpha = m.dim, par.p, par.alpha
    if m.is_euclidean:
        lam = 0.0
        _require(1 < p < N, "needs 1 < p < N")
    else:
        _hyperbolic_only(m)
        _require(2 <= p < N, "needs 2 <= p < N")
        lam = lambda_log(N, p, m)
    gn = gn_constant(ExponentParams(N, p, alpha))
    mass = lp_integral(u, m, p, cfg)
    grad = grad_lp_integral(u, m, p, cfg)
    big = lp_integral(u, m, alpha * p, cfg)
    small = lp_integral(u, m, gn.q, cfg)
    br, br_err = _bracket(grad, lam, mass)
    if br <= 0:
        raise LogArgumentNonpositive(f"spectral bracket {br!r} is not positive")
    t = gn.theta
    if gn.branch == "alpha_gt_1":
        top, other, other_exp = big, small, 1.0 / gn.q
        top_exp = 1.0 / (alpha * p)
    else:
        top, other, other_exp = small, big, 1.0 / (alpha * p)
        top_exp = 1.0 / gn.q
    lhs = top.value ** top_exp
    b_pow = br ** (t / p)
    o_pow = other.value ** (other_exp * (1 - t))
    rhs = gn.constant * b_pow * o_pow
    err = (power_error(top.value, top.error_estimate, top_exp)
           + gn.constant * o_pow * power_error(br, br_err, t / p)
           + gn.constant * b_pow * power_error(other.value, other.error_estimate,
                                               other_exp * (1 - t)))
    return _report(InequalityId.GN_POINCARE, m, replace(par, lam=lam or None), u, lhs, rhs, err)


def _log_form(iid, u, m, par, lam, L, cfg):
    """int u^p ln u <= (N/p^2) ln[L (||grad u||_p^p - lam)] at ||u||_p = 1."""
    N, p = m.dim, par.p
    mass = lp_integral(u, m, p, cfg)
    ent = entropy_integral(u, m, p, cfg)
    grad = grad_lp_integral(u, m, p, cfg)
    I = mass.value
    c = I ** (1.0 / p)
    lhs = ent.value / I - math.log(c)
    g = grad.value / I
    br = g - lam
    if br <= 0:
        raise LogArgumentNonpositive(
            f"{u.label}: log argument {L!r} * {br!r} is not positive")
    rhs = N / p ** 2 * math.log(L * br)
    rel_mass = mass.error_estimate / I
    err = (ent.error_estimate / I + abs(lhs) * rel_mass + rel_mass / p
           + N / p ** 2 * (grad.error_estimate / I + g * rel_mass) / br)
    return _report(iid, m, replace(par, lam=lam or None), u, lhs, rhs, err,
                   normalized=True, scale=c)


def _log_sobolev(u, m, par, cfg):
    _hyperbolic_only(m)
    N, p = m.dim, par.p
    _require(2 <= p < N, "needs 2 <= p < N")
    return _log_form(InequalityId.LOG_SOBOLEV, u, m, par, lambda_log(N, p, m),
                     log_sobolev_constant(N, p), cfg)


def _log_sobolev_2(u, m, par, cfg):
    _hyperbolic_only(m)
    N = m.dim
    _require(par.p == 2 and N >= 3, "needs p = 2 and N >= 3")
    lam = N ** 2 * (N - 1) / (4.0 * (N + 2))
    return _log_form(InequalityId.LOG_SOBOLEV_2, u, m, par, lam, 2 / (math.pi * N * math.e), cfg)


def _euclidean_log_sobolev(u, m, par, cfg):
    _require(m.is_euclidean, f"{m.label}: this inequality is stated on R^N", DomainError)
    N, p = m.dim, par.p
    _require(1 <= p < N, "needs 1 <= p < N")
    return _log_form(InequalityId.EUCLIDEAN_LOG_SOBOLEV, u, m, par, 0.0,
                     log_sobolev_constant(N, p), cfg)


def condition_scan(m: ManifoldModel) -> tuple[float, float, int]:
    """Default audit grid: 400 points on [0.01, min(10, 0.98 * validity end)]."""
    return (0.01, min(10.0, 0.98 * m.validity[1]), 400)


def _gate_model(m: ManifoldModel, p: float, needed: Sequence[str]) -> float:
    if m.is_euclidean:
        raise DomainError("the model-manifold inequalities need a curved model (a3 > 0)")
    a3 = taylor_a3(m)
    if not a3 > 0:
        raise ConditionViolated(f"{m.label}: a3 = {a3!r} must be positive")
    reports = {r.condition_id: r for r in check_conditions(m, p, condition_scan(m))}
    for cid in needed:
        rep = reports[cid]
        if not rep.passed:
            raise ConditionViolated(f"{m.label}: condition {cid} fails", rep.witness)
    return a3


def _model_log_sobolev_2(u, m, par, cfg):
    N = m.dim
    _require(par.p == 2 and N >= 3, "needs p = 2 and N >= 3")
    a3 = _gate_model(m, 2.0, ("regularity", "kernel_positive", "attainment_zero"))
    lam = 3 * N ** 2 * (N - 1) * a3 / (2.0 * (N + 2))
    return _log_form(InequalityId.MODEL_LOG_SOBOLEV_2, u, m, par, lam,
                     log_sobolev_constant(N, 2), cfg)


def _model_log_sobolev_p(u, m, par, cfg):
    N, p = m.dim, par.p
    _require(2 < p < N, "needs 2 < p < N")
    _gate_model(m, p, ("regularity", "c1_limit", "kernel_positive"))
    lo, hi, count = condition_scan(m)
    lam = lambda_from_correction(correction_lower_constant(m, p, (1e-3, hi, count)).C, N, p)
    return _log_form(InequalityId.MODEL_LOG_SOBOLEV_P, u, m, par, lam,
                     log_sobolev_constant(N, p), cfg)


def holder_entropy_bound(u: RadialProfile, m: ManifoldModel, p: float, s: float,
                         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> InequalityReport:
    """int ln(u/||u||_p) u^p <= s/(s-p) ||u||_p^p ln(||u||_s/||u||_p) for 1 <= p < s."""
    if not 1 <= p < s:
        raise RangeError("needs 1 <= p < s")
    mass = lp_integral(u, m, p, cfg)
    high = lp_integral(u, m, s, cfg)
    ent = entropy_integral(u, m, p, cfg)
    I = mass.value
    log_np = math.log(I) / p
    lhs = ent.value - log_np * I
    rhs = s / (s - p) * I * (math.log(high.value) / s - log_np)
    err = (ent.error_estimate + (abs(log_np) + 1 / p) * mass.error_estimate
           + s / (s - p) * (abs(math.log(high.value) / s - log_np) * mass.error_estimate
                            + I * (high.error_estimate / (s * high.value)
                                   + mass.error_estimate / (p * I))))
    return _report(InequalityId.HOLDER_ENTROPY, m, ExponentParams(m.dim, p, s=s), u, lhs, rhs, err)


def _holder_entropy(u, m, par, cfg):
    _require(par.s is not None, "holder_entropy needs s")
    return holder_entropy_bound(u, m, par.p, par.s, cfg)


# Gaussian-measure family.

def _gauss_setup(m: ManifoldModel, method: str):
    _hyperbolic_only(m)
    _require(m.dim >= 3, "the Gaussian-measure inequalities need N >= 3")
    return gmod.GaussianMeasure.build(m.dim, method)


def _gaussian_log_sobolev(u, m, par, cfg, method="series"):
    gm = _gauss_setup(m, method)
    lhs, lerr = gmod.entropy_dm(u, gm, cfg)
    dirichlet = gmod.dirichlet_dm(u, gm, cfg)
    pot = gmod.potential_term(gm, u, cfg)
    rhs = 2 * dirichlet.value + pot.value
    err = lerr + 2 * dirichlet.error_estimate + pot.error_estimate
    return _report(InequalityId.GAUSSIAN_LOG_SOBOLEV, m, replace(par, p=2.0), u, lhs, rhs, err)


def _interpolation_form(iid, u, m, par, exponent, power, dirichlet_coef, potential_coef, cfg,
                        method):
    """int u^2 dm - (int |u|^exponent dm)^power <= c1 int |grad u|^2 dm + c2 int bracket u^2 dm."""
    gm = _gauss_setup(m, method)
    mass = gmod.lp_dm(u, gm, 2.0, cfg)
    part = gmod.lp_dm(u, gm, exponent, cfg)
    lhs = mass.value - part.value ** power
    err = mass.error_estimate + power_error(part.value, part.error_estimate, power)
    if dirichlet_coef == 0 and potential_coef == 0:
        return _report(iid, m, par, u, lhs, 0.0, err)
    dirichlet = gmod.dirichlet_dm(u, gm, cfg)
    pot = gmod.potential_term(gm, u, cfg)
    rhs = dirichlet_coef * dirichlet.value + potential_coef * pot.value
    err += abs(dirichlet_coef) * dirichlet.error_estimate + abs(potential_coef) * pot.error_estimate
    return _report(iid, m, par, u, lhs, rhs, err)


def _gaussian_poincare_general(u, m, par, cfg, method="series",
                               iid=InequalityId.GAUSSIAN_POINCARE_GENERAL):
    p = par.p
    _require(0 < p <= 2, "needs 0 < p <= 2")
    k = (2 - p) / p
    return _interpolation_form(iid, u, m, par, p, 2 / p, 2 * k, k, cfg, method)


def _gaussian_poincare(u, m, par, cfg, method="series"):
    _require(par.p == 1, "the Gaussian Poincare inequality has p = 1")
    return _gaussian_poincare_general(u, m, par, cfg, method, InequalityId.GAUSSIAN_POINCARE)


def _beckner_family(u, m, par, cfg, method="series"):
    a, q, q0 = par.alpha, par.q, par.s
    _require(None not in (a, q, q0), "beckner_family needs alpha (= a), q and s (= q0)")
    _require(a > 0 and q0 > 0 and q >= q0, "needs a > 0, q0 > 0 and q >= q0")
    b = 1 - a * q0 if par.b is None else par.b
    if abs(a * q0 + b - 1) > 1e-12:
        raise RangeError(f"a*q0 + b must equal 1, got {a * q0 + b!r}")
    power = a * q + b
    k = a * (q - q0)
    return _interpolation_form(InequalityId.BECKNER_FAMILY, u, m, replace(par, b=b), 2 / power,
                               power, 2 * k, k, cfg, method)


def _beckner_lambda(u, m, par, cfg, method="series"):
    lam = par.lam
    _require(lam is not None and lam > 0, "beckner_lambda needs lambda > 0")
    return _interpolation_form(InequalityId.BECKNER_LAMBDA, u, m, par, 4 / (lam + 2),
                               (lam + 2) / 2, lam, lam / 2, cfg, method)


# Heat-kernel measure family.

def _heat_spec(m: ManifoldModel, par: ExponentParams):
    _hyperbolic_only(m)
    return heat.HeatKernelSpec(m.dim, 1.0, par.alpha if par.alpha is not None else 1.0)


def _extended_beckner(u, m, par, cfg):
    _require(par.q is not None, "extended_beckner needs q")
    return heat.verify_extended_beckner(u, _heat_spec(m, par), par.p, par.q, cfg)


def _gamma_log_sobolev(u, m, par, cfg):
    return heat.verify_gamma_log_sobolev(u, _heat_spec(m, par), cfg)


_HANDLERS: dict[InequalityId, Callable] = {
    InequalityId.POINCARE: _poincare,
    InequalityId.POINCARE_SOBOLEV_LAMBDA: _poincare_sobolev_lambda,
    InequalityId.POINCARE_SOBOLEV_SHARP: _poincare_sobolev_sharp,
    InequalityId.HEBEY_SOBOLEV: _hebey_sobolev,
    InequalityId.GN_POINCARE: _gn_poincare,
    InequalityId.LOG_SOBOLEV: _log_sobolev,
    InequalityId.LOG_SOBOLEV_2: _log_sobolev_2,
    InequalityId.EUCLIDEAN_LOG_SOBOLEV: _euclidean_log_sobolev,
    InequalityId.HOLDER_ENTROPY: _holder_entropy,
    InequalityId.GAUSSIAN_LOG_SOBOLEV: _gaussian_log_sobolev,
    InequalityId.GAUSSIAN_POINCARE_GENERAL: _gaussian_poincare_general,
    InequalityId.GAUSSIAN_POINCARE: _gaussian_poincare,
    InequalityId.BECKNER_FAMILY: _beckner_family,
    InequalityId.BECKNER_LAMBDA: _beckner_lambda,
    InequalityId.MODEL_LOG_SOBOLEV_2: _model_log_sobolev_2,
    InequalityId.MODEL_LOG_SOBOLEV_P: _model_log_sobolev_p,
    InequalityId.EXTENDED_BECKNER: _extended_beckner,
    InequalityId.GAMMA_LOG_SOBOLEV: _gamma_log_sobolev,
}


GAUSSIAN_MEASURE_IDS = frozenset({
    InequalityId.GAUSSIAN_LOG_SOBOLEV, InequalityId.GAUSSIAN_POINCARE_GENERAL,
    InequalityId.GAUSSIAN_POINCARE, InequalityId.BECKNER_FAMILY, InequalityId.BECKNER_LAMBDA})


def verify(iid: Union[InequalityId, str], u: RadialProfile, m: ManifoldModel,
           params: ExponentParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
           gaussian_method: str = "series") -> InequalityReport:
    """Evaluate one inequality; `gaussian_method` selects how G is computed for
    the Gaussian-measure family ("series" or "quadrature")."""
    iid = InequalityId(iid)
    if params.N != m.dim:
        raise RangeError(f"params.N = {params.N} does not match the manifold dimension {m.dim}")
    if iid in GAUSSIAN_MEASURE_IDS:
        return _HANDLERS[iid](u, m, params, cfg, gaussian_method)
    return _HANDLERS[iid](u, m, params, cfg)


@dataclass(frozen=True)
class SkippedItem:
    """A suite combination that was not evaluated, with the reason."""

    id: str
    manifold: str
    params: ExponentParams
    profile: str
    reason: str

    passed = True
    skipped = True

    def to_dict(self) -> dict:
        return {"id": self.id, "manifold": self.manifold, **self.params.to_dict(),
                "profile": self.profile, "skipped": self.reason}


SuiteEntry = Union[InequalityReport, SkippedItem]


def _safe_verify(iid, u, m, params, cfg, gaussian_method) -> SuiteEntry:
    try:
        return verify(iid, u, m, params, cfg, gaussian_method)
    except (IneqError, ValueError) as exc:
        return SkippedItem(str(InequalityId(iid)), m.label, params, u.label,
                           f"{type(exc).__name__}: {exc}")


def verify_suite(ids: Iterable, profiles: Iterable[RadialProfile], m: ManifoldModel,
                 params_grid: Iterable[ExponentParams],
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                 workers: Optional[int] = None,
                 gaussian_method: str = "series") -> list[SuiteEntry]:
    """Cross product ids x profiles x params in that nesting order.

    Invalid combinations become SkippedItem entries. With `workers` the items
    run on a thread pool; the output order is unchanged.
    """
    grid = list(params_grid)
    jobs = [(InequalityId(i), u, par) for i in ids for u in profiles for par in grid]
    run = lambda job: _safe_verify(job[0], job[1], m, job[2], cfg, gaussian_method)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]
