"""Closed-form and variational constants.

Conventions: omega = |S^{N-1}|, sigma = omega / N, and the correction kernel
k_{N,p}(s) = psi(Phi^{-1}(s))^{p(N-1)} - s^{p(N-1)/N} in the volume coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special

from . import numerics
from .errors import BranchMismatch, ConditionViolated, DomainError, NonConvergent, RangeError
from .manifold import (ManifoldModel, builtin_manifold, c1_limit, kernel_on_radius, phi,
                       phi_inverse, sphere_area, taylor_a3)
from .numerics import QuadratureConfig


@dataclass(frozen=True)
class ExponentParams:
    N: int
    p: float
    alpha: Optional[float] = None
    q: Optional[float] = None
    s: Optional[float] = None
    lam: Optional[float] = None
    b: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: v for k, v in (("N", self.N), ("p", self.p), ("alpha", self.alpha),
                                   ("q", self.q), ("s", self.s), ("lambda", self.lam),
                                   ("b", self.b)) if v is not None}


def correction_kernel(m: ManifoldModel, p: float, s):
    """k_{N,p}(s), inverting Phi numerically for each volume s."""
    N = m.dim
    e = p * (N - 1)

    def one(x):
        if x < 0:
            raise DomainError("volume must be nonnegative")
        if m.is_euclidean:
            return 0.0
        t = phi_inverse(m, x)
        return float(m.psi(t)) ** e - x ** (e / N)

    if np.ndim(s) == 0:
        return one(float(s))
    return np.array([one(float(x)) for x in np.ravel(s)]).reshape(np.shape(s))


def correction_quotient(m: ManifoldModel, p: float, t):
    """k_{N,p}(Phi(t)) / Phi(t)^p, written as (psi^(N-1)/Phi)^p - Phi^(-p/N)
    so that neither term overflows."""
    N = m.dim
    t = np.asarray(t, dtype=float)
    ph = np.asarray(phi(m, t), dtype=float)
    psi = np.asarray(m.psi(t), dtype=float)
    if m.is_euclidean:
        out = np.zeros_like(ph)
    else:
        out = (psi ** (N - 1) / ph) ** p - ph ** (-p / N)
    return float(out) if out.ndim == 0 else out


def quotient_limits(m: ManifoldModel, p: float) -> tuple[float, Optional[float]]:
    """Limits of the correction quotient at t -> 0 and t -> infinity.

    Near the pole k(Phi(t)) ~ 3p(N-1)a3/(N+2) t^(p(N-1)+2) while
    Phi^p ~ t^(Np), so the quotient tends to 6(N-1)a3/(N+2) when p = 2 and
    to 0 or +-infinity otherwise. At infinity it tends to ((N-1)/N)^p C1^p.
    The second limit is None for warpings valid only on a bounded interval.
    """
    N = m.dim
    a3 = taylor_a3(m)
    if p == 2:
        zero = 6.0 * (N - 1) * a3 / (N + 2)
    elif a3 == 0.0 or p < 2:
        zero = 0.0
    else:
        zero = math.copysign(math.inf, a3)
    try:
        c1 = c1_limit(m)
    except DomainError:
        return zero, None
    return zero, ((N - 1) / N) ** p * c1 ** p


@dataclass(frozen=True)
class CorrectionConstant:
    C: float
    limit_zero: float
    limit_infinity: Optional[float]
    argmin: float
    grid_min: float
    kernel_positive: bool


DEFAULT_SCAN = (1e-3, 20.0, 400)


@lru_cache(maxsize=256)
def correction_lower_constant(m: ManifoldModel, p: float,
                              scan: tuple[float, float, int] = DEFAULT_SCAN) -> CorrectionConstant:
    """C(N,p) = inf over t of the correction quotient.

    The grid infimum is combined with the analytic endpoint limits. A kernel
    that is identically zero (Euclidean space) gives C = 0; a kernel that is
    negative somewhere raises ConditionViolated with the worst grid point.
    """
    N = m.dim
    if p < N / (N - 1):
        raise RangeError(f"p must be at least N/(N-1) = {N / (N - 1):.6g}")
    t_min, t_max, count = scan
    m.check_radius([t_min, t_max])
    ts = np.linspace(t_min, t_max, int(count))
    psi_e = np.asarray(m.psi(ts), dtype=float) ** (p * (N - 1))
    k = kernel_on_radius(m, p, ts)
    zero, inf = quotient_limits(m, p)
    if np.all(np.abs(k) <= 1e-12 * psi_e):
        return CorrectionConstant(0.0, zero, inf, float(ts[0]), 0.0, False)
    if np.any(k < -1e-12 * psi_e):
        i = int(np.argmin(k))
        raise ConditionViolated(
            f"{m.label}: correction kernel negative at t={ts[i]:.6g} (k={k[i]:.6g})",
            witness=(float(ts[i]), float(k[i])))
    argmin, grid_min = numerics.minimize_scalar(lambda t: correction_quotient(m, p, t), scan)
    C = min(v for v in (grid_min, zero, inf) if v is not None)
    return CorrectionConstant(C, zero, inf, argmin, grid_min, bool(np.all(k > 1e-12 * psi_e)))


def lambda_from_correction(C: float, N: int, p: float) -> float:
    """lambda = C (N/p)^p: the kernel bound k(s) >= C s^p, the volume factor
    N^p and the Hardy bound int v^p <= p^p int |v'|^p s^p combined."""
    return C * (N / p) ** p


def lambda_log(N: int, p: float, m: Optional[ManifoldModel] = None) -> float:
    """Spectral shift lambda(N,p) for the Poincare-Sobolev and log-Sobolev
    families; exact N^2(N-1)/(4(N+2)) for p = 2 on hyperbolic space."""
    if not 2 <= p < N:
        raise RangeError(f"lambda needs 2 <= p < N, got p={p!r}, N={N}")
    if m is None:
        m = builtin_manifold("hyperbolic", N)
    if m.dim != N:
        raise RangeError("manifold dimension does not match N")
    if p == 2 and m.is_hyperbolic:
        return N ** 2 * (N - 1) / (4.0 * (N + 2))
    return lambda_from_correction(correction_lower_constant(m, p).C, N, p)


def log_sobolev_constant(N: int, p: float) -> float:
    """Sharp constant of the Euclidean L^p logarithmic Sobolev inequality
    (0^0 read as 1 at p = 1)."""
    if not 1 <= p < N:
        raise RangeError(f"log-Sobolev constant needs 1 <= p < N, got p={p!r}")
    ratio = math.exp(math.lgamma(N / 2 + 1) - math.lgamma(N * (p - 1) / p + 1))
    return (p / N) * math.pi ** (-p / 2) * ((p - 1) / math.e) ** (p - 1) * ratio ** (p / N)


def talenti_constant(N: int, p: float) -> float:
    """Closed form of the sharp Euclidean Sobolev constant."""
    lg = math.lgamma
    bracket = math.exp(lg(N / p) + lg(1 + N - N / p) - lg(1 + N / 2) - lg(N))
    return (math.sqrt(math.pi) * N ** (1 / p) * ((N - p) / (p - 1)) ** ((p - 1) / p)
            * bracket ** (1 / N))


_BUBBLE_CFG = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-300, tail_cut=1.0)


def bubble_quotient(N: int, p: float) -> float:
    """||grad b||_p / ||b||_{Np/(N-p)} for b = (1 + r^(p/(p-1)))^(-(N-p)/p)."""
    ps = N * p / (N - p)
    e = p / (p - 1)
    c = (N - p) / p

    def b(r):
        return (1 + np.asarray(r, dtype=float) ** e) ** (-c)

    def db(r):
        r = np.asarray(r, dtype=float)
        return -c * e * r ** (e - 1) * (1 + r ** e) ** (-c - 1)

    grad = numerics.integrate_semi_infinite(lambda r: np.abs(db(r)) ** p * r ** (N - 1),
                                            _BUBBLE_CFG, decay="algebraic", breakpoints=(1.0,))
    mass = numerics.integrate_semi_infinite(lambda r: b(r) ** ps * r ** (N - 1),
                                            _BUBBLE_CFG, decay="algebraic", breakpoints=(1.0,))
    omega = sphere_area(N)
    return (omega * grad.value) ** (1 / p) / (omega * mass.value) ** (1 / ps)


@lru_cache(maxsize=None)
def sharp_sobolev_constant(N: int, p: float) -> float:
    """S(N,p) with ||grad u||_p >= S ||u||_{Np/(N-p)} on R^N.

    The closed form is checked against the Rayleigh quotient of the
    extremal bubble; a mismatch beyond 1e-6 is an error.
    """
    if not 1 < p < N:
        raise RangeError(f"Sobolev constant needs 1 < p < N, got p={p!r}")
    closed = talenti_constant(N, p)
    oracle = bubble_quotient(N, p)
    if abs(closed / oracle - 1) > 1e-6:
        raise NonConvergent(f"Sobolev constant {closed!r} disagrees with bubble quotient {oracle!r}")
    return closed


@dataclass(frozen=True)
class GNConstant:
    constant: float
    theta: float
    q: float
    delta: float
    branch: str


def gn_constant(params: ExponentParams, branch: Optional[str] = None) -> GNConstant:
    """Sharp Gagliardo-Nirenberg constants of the two Del Pino-Dolbeault families."""
    N, p, alpha = params.N, params.p, params.alpha
    if alpha is None:
        raise RangeError("GN constant needs alpha")
    if not 1 < p < N:
        raise RangeError(f"GN constant needs 1 < p < N, got p={p!r}")
    if not 0 < alpha <= N / (N - p) or alpha == 1:
        raise RangeError(f"alpha must lie in (0, N/(N-p)] = (0, {N / (N - p):.6g}] and differ from 1")
    natural = "alpha_gt_1" if alpha > 1 else "alpha_lt_1"
    if branch is None:
        branch = natural
    if branch != natural:
        raise BranchMismatch(f"alpha={alpha!r} belongs to branch {natural}, not {branch}")
    q = alpha * (p - 1) + 1
    delta = N * p - (N - p) * q
    lg = math.lgamma
    if branch == "alpha_gt_1":
        theta = N * (alpha - 1) / (alpha * (N * p - (alpha * p + 1 - alpha) * (N - p)))
        gam = math.exp(lg(q * (p - 1) / (q - p)) + lg(N / 2 + 1)
                       - lg((p - 1) / p * delta / (q - p)) - lg(N * (p - 1) / p + 1))
        value = (((q - p) / (p * math.sqrt(math.pi))) ** theta
                 * (p * q / (N * (q - p))) ** (theta / p)
                 * (delta / (p * q)) ** (1 / (alpha * p))
                 * gam ** (theta / N))
    else:
        theta = N * (1 - alpha) / ((alpha * p + 1 - alpha) * (N - alpha * (N - p)))
        gam = math.exp(lg((p - 1) / p * delta / (p - q) + 1) + lg(N / 2 + 1)
                       - lg(q * (p - 1) / (p - q) + 1) - lg(N * (p - 1) / p + 1))
        value = (((p - q) / (p * math.sqrt(math.pi))) ** theta
                 * (p * q / (N * (p - q))) ** (theta / p)
                 * (p * q / delta) ** ((1 - theta) / (alpha * p))
                 * gam ** (theta / N))
    return GNConstant(value, theta, q, delta, branch)


def gaussian_normalization(N: int, method: str = "series") -> float:
    """G = int exp(-rho^2/2) dV over hyperbolic space.

    The series form expands sinh^(N-1) into exponentials; each term
    e^(a^2/2)(1 + erf(a/sqrt 2)) is evaluated as erfcx(-a/sqrt 2) to avoid
    cancellation for negative a.
    """
    if N < 2:
        raise RangeError("N must be at least 2")
    omega = sphere_area(N)
    if method == "quadrature":
        f = lambda r: np.exp(-np.asarray(r) ** 2 / 2) * np.sinh(r) ** (N - 1)
        cfg = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-300)
        return omega * numerics.integrate_semi_infinite(f, cfg).value
    if method != "series":
        raise RangeError(f"unknown method {method!r}")
    terms = []
    for k in range(N):
        a = N - 1 - 2 * k
        terms.append(math.comb(N - 1, k) * (-1) ** k * float(special.erfcx(-a / math.sqrt(2))))
    return math.sqrt(math.pi / 2) * omega / 2 ** (N - 1) * math.fsum(terms)


def gaussian_normalization_bound(N: int) -> float:
    return math.sqrt(2 * math.pi) * 2.0 ** (1 - N) * math.exp((N - 1) ** 2 / 2) * sphere_area(N)


def gaussian_c2(N: int) -> float:
    """Constant C2 in the potential term of the Gaussian-measure inequalities."""
    if N < 3:
        raise RangeError("C2 is defined for N >= 3")
    L = log_sobolev_constant(N, 2)
    return (L ** (N / 2) * math.sqrt(2 * math.pi) / 2 ** (N - 1) * math.exp((N - 1) ** 2 / 2)
            * sphere_area(N) * (N * math.e / 4) ** (N / 2))


def poincare_constant(N: int, p: float) -> float:
    if N < 2 or not p > 1:
        raise RangeError("Poincare constant needs N >= 2 and p > 1")
    return ((N - 1) / p) ** p
