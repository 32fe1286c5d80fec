"""Heat kernels of odd-dimensional hyperbolic space and the heat-kernel measure.

With m = (N-1)/2 the kernel is

    p_N(rho, t) = (-1)^m / (2 pi)^m (4 pi t)^(-1/2) e^(-m^2 t) D^m exp(-rho^2 / (4t)),

where D = (1/sinh rho) d/drho. In the variable x = cosh rho the operator D is
plain d/dx, which gives a convergent Taylor expansion in y = cosh rho - 1 that
is used near the pole where the closed form cancels catastrophically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import numerics
from .constants import ExponentParams
from .errors import RangeError
from .manifold import builtin_manifold
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureResult
from .profiles import RadialProfile
from .rearrange import radial_integral
from .reports import InequalityReport, power_error

SUPPORTED_DIMS = (3, 5, 7)
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 48


@dataclass(frozen=True)
class HeatKernelSpec:
    """N odd in {3, 5, 7}; t is the kernel time and alpha the semigroup time scale."""

    N: int
    t: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.N not in SUPPORTED_DIMS:
            raise RangeError(f"heat kernels are available for N in {SUPPORTED_DIMS}, got {self.N}")
        if not self.t > 0 or not self.alpha > 0:
            raise RangeError("time and time scale must be positive")

    @property
    def m(self) -> int:
        return (self.N - 1) // 2


@lru_cache(maxsize=None)
def _symbolic(m: int):
    """sympy expression for D^m exp(-rho^2/(4t)) and its symbols."""
    import sympy as sp

    r, t = sp.symbols("rho t", positive=True)
    expr = sp.exp(-r ** 2 / (4 * t))
    for _ in range(m):
        expr = sp.diff(expr, r) / sp.sinh(r)
    return sp, r, t, expr


@lru_cache(maxsize=None)
def _closed_form(m: int) -> Callable:
    sp, r, t, expr = _symbolic(m)
    return sp.lambdify((r, t), expr, "numpy")


@lru_cache(maxsize=None)
def _acosh_sq_coeffs(n: int = _SERIES_TERMS) -> np.ndarray:
    """Taylor coefficients of acosh(1 + y)^2 in y."""
    c = np.zeros(n + 1)
    for k in range(1, n + 1):
        c[k] = 2.0 * (-1) ** (k + 1) * math.exp(
            k * math.log(2.0) + 2 * math.lgamma(k) - math.lgamma(2 * k + 1))
    return c


def _series_derivative(m: int, y: np.ndarray, t: float) -> np.ndarray:
    """d^m/dx^m exp(-acosh(x)^2/(4t)) at x = 1 + y.

    acosh(1+y)^2 = 2y + g(y) with g = O(y^2); the factor exp(-y/(2t)) is kept
    in closed form and only H = exp(-g/(4t)) is expanded, so the series stays
    well conditioned for small t. Leibniz then combines the two factors.
    """
    a = 1.0 / (4.0 * t)
    h = -a * _acosh_sq_coeffs()
    h[1] = 0.0
    n = len(h) - 1
    H = np.zeros(n + 1)
    H[0] = 1.0
    k = np.arange(1, n + 1)
    for j in range(1, n + 1):
        H[j] = np.dot(k[:j] * h[1:j + 1], H[j - 1::-1][:j]) / j
    out = np.zeros_like(y)
    for j in range(m + 1):
        # j-th derivative of H: sum_i i!/(i-j)! H_i y^(i-j).
        coeffs = np.array([math.perm(i, j) for i in range(j, n + 1)], dtype=float) * H[j:]
        dj = np.zeros_like(y)
        for c in coeffs[::-1]:
            dj = dj * y + c
        out = out + math.comb(m, j) * (-2.0 * a) ** (m - j) * dj
    return np.exp(-2.0 * a * y) * out


def _p3(r: np.ndarray, t: float) -> np.ndarray:
    small = r < 1e-4
    rs = np.where(small, 1.0, r)
    ratio = np.where(small, 1.0 - r * r / 6.0, rs / np.sinh(rs))
    return (4 * math.pi * t) ** -1.5 * ratio * np.exp(-t - r * r / (4 * t))


def heat_kernel_value(N: int, rho, t: float):
    """p_N(rho, t), vectorized in rho."""
    spec = HeatKernelSpec(N, t)
    m = spec.m
    r = np.abs(np.asarray(rho, dtype=float))
    if m == 1:
        with np.errstate(over="ignore"):
            out = _p3(r, t)
        return float(out) if out.ndim == 0 else out
    pref = (-1) ** m / (2 * math.pi) ** m / math.sqrt(4 * math.pi * t) * math.exp(-m * m * t)
    small = r < _SERIES_CUTOFF
    y = 2.0 * np.sinh(np.where(small, r, 0.0) / 2) ** 2
    near = _series_derivative(m, y, t)
    rl = np.where(small, 1.0, r)
    with np.errstate(all="ignore"):
        far = np.asarray(_closed_form(m)(rl, t), dtype=float)
    # Far out the closed form is 0 * inf; the kernel is below underflow there.
    far = np.where(np.isfinite(far), far, 0.0)
    out = pref * np.where(small, near, far)
    return float(out) if out.ndim == 0 else out


def heat_kernel(spec: HeatKernelSpec, rho):
    return heat_kernel_value(spec.N, rho, spec.t)


def _hyperbolic(N: int):
    return builtin_manifold("hyperbolic", N)


def kernel_integral(f: Callable, N: int, time: float, breakpoints=(),
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int f(rho) p_N(rho, time) dV."""
    return radial_integral(lambda r: np.asarray(f(r), dtype=float) * heat_kernel_value(N, r, time),
                           _hyperbolic(N), breakpoints=breakpoints, cfg=cfg)


def heat_normalization(spec: HeatKernelSpec,
                       cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Total mass of p_N(., t); equals 1 by mass conservation."""
    return kernel_integral(lambda r: np.ones_like(np.asarray(r, dtype=float)),
                           spec.N, spec.t, cfg=cfg).value


def _laplacian_residual_fd(N: int, rho: float, t: float) -> float:
    d_t = numerics.differentiate(lambda s: heat_kernel_value(N, rho, s), t, 1)
    f = lambda r: heat_kernel_value(N, r, t)
    d1 = numerics.differentiate(f, rho, 1)
    d2 = numerics.differentiate(f, rho, 2)
    return abs(d_t - (d2 + (N - 1) / math.tanh(rho) * d1))


@lru_cache(maxsize=None)
def _symbolic_residual(m: int) -> Callable:
    sp, r, t, expr = _symbolic(m)
    N = 2 * m + 1
    p = sp.exp(-m * m * t) / sp.sqrt(t) * expr
    res = sp.diff(p, t) - sp.diff(p, r, 2) - (N - 1) * sp.cosh(r) / sp.sinh(r) * sp.diff(p, r)
    return sp.lambdify((r, t), res, "numpy")


def heat_pde_residual(spec: HeatKernelSpec, rho_range=(0.2, 3.0), t_range=(0.5, 2.0),
                      counts=(12, 8), method: str = "finite_difference") -> float:
    """max |d_t p - (p'' + (N-1) coth(rho) p')| over a grid.

    `method="symbolic"` differentiates the closed form exactly instead of
    by finite differences.
    """
    n_rho, n_t = counts
    if n_rho == 0 or n_t == 0:
        return 0.0
    if rho_range[0] <= 0 or t_range[0] <= 0:
        raise RangeError("grid must lie strictly inside (0, inf) x (0, inf)")
    rhos = np.linspace(*rho_range, n_rho)
    ts = np.linspace(*t_range, n_t)
    if method == "finite_difference":
        return max(_laplacian_residual_fd(spec.N, float(r), float(t)) for r in rhos for t in ts)
    if method != "symbolic":
        raise RangeError(f"unknown method {method!r}")
    m = spec.m
    pref = (-1) ** m / (2 * math.pi) ** m / math.sqrt(4 * math.pi)
    R, T = np.meshgrid(rhos, ts)
    return float(np.max(np.abs(pref * _symbolic_residual(m)(R, T))))


def chapman_kolmogorov_origin(spec: HeatKernelSpec, s: float, t: float,
                              cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """(int p(rho, s) p(rho, t) dV, p(0, s + t))."""
    if not s > 0 or not t > 0:
        raise RangeError("times must be positive")
    lhs = kernel_integral(lambda r: heat_kernel_value(spec.N, r, s), spec.N, t, cfg=cfg).value
    return lhs, heat_kernel_value(spec.N, 0.0, s + t)


def semigroup_apply_origin(f: RadialProfile, spec: HeatKernelSpec, s: float = 1.0,
                           cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """P_s f(0) = int f p_N(rho, alpha s) dV."""
    return kernel_integral(f, spec.N, spec.alpha * s, f.breakpoints, cfg).value


def _require_positive(f: RadialProfile) -> None:
    if not f.floor > 0:
        raise RangeError(f"{f.label}: the heat-measure inequalities need a profile bounded "
                         "below by a positive constant (shift it, e.g. 1+SPEC)")


def _gamma(f: Callable, spec: HeatKernelSpec, f_profile: RadialProfile, cfg) -> QuadratureResult:
    return kernel_integral(f, spec.N, spec.alpha, f_profile.breakpoints, cfg)


def verify_extended_beckner(f: RadialProfile, spec: HeatKernelSpec, p: float, q: float,
                            cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> InequalityReport:
    """(int f^q dg)^(2/q) - (int f^p dg)^(2/p) <= 2 alpha (q-p) (int |f'|^q dg)^(2/q)
    for the heat-kernel measure dg = p_N(rho, alpha) dV."""
    if not q >= 2 or not 1 <= p <= q:
        raise RangeError("extended Beckner needs q >= 2 and 1 <= p <= q")
    _require_positive(f)
    mq = _gamma(lambda r: np.abs(f(r)) ** q, spec, f, cfg)
    mp = _gamma(lambda r: np.abs(f(r)) ** p, spec, f, cfg)
    grad = _gamma(lambda r: np.abs(f.derivative(r)) ** q, spec, f, cfg)
    lhs = mq.value ** (2 / q) - mp.value ** (2 / p)
    rhs = 2 * spec.alpha * (q - p) * grad.value ** (2 / q)
    err = (power_error(mq.value, mq.error_estimate, 2 / q)
           + power_error(mp.value, mp.error_estimate, 2 / p)
           + 2 * spec.alpha * (q - p) * power_error(grad.value, grad.error_estimate, 2 / q))
    return InequalityReport("extended_beckner", f"hyperbolic-{spec.N}",
                            ExponentParams(spec.N, p, alpha=spec.alpha, q=q), f.label,
                            lhs, rhs, err)


def verify_gamma_log_sobolev(f: RadialProfile, spec: HeatKernelSpec,
                             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> InequalityReport:
    """int f^2 log f^2 dg <= log(int f^2 dg) int f^2 dg + 4 alpha int |f'|^2 dg."""
    _require_positive(f)

    def ent(r):
        x = np.asarray(f(r), dtype=float) ** 2
        return x * np.log(x)

    e = _gamma(ent, spec, f, cfg)
    mass = _gamma(lambda r: np.asarray(f(r), dtype=float) ** 2, spec, f, cfg)
    grad = _gamma(lambda r: np.asarray(f.derivative(r), dtype=float) ** 2, spec, f, cfg)
    rhs = math.log(mass.value) * mass.value + 4 * spec.alpha * grad.value
    err = (e.error_estimate + (abs(math.log(mass.value)) + 1) * mass.error_estimate
           + 4 * spec.alpha * grad.error_estimate)
    return InequalityReport("gamma_log_sobolev", f"hyperbolic-{spec.N}",
                            ExponentParams(spec.N, 2.0, alpha=spec.alpha), f.label,
                            e.value, rhs, err)
