"""Rearrangements of radial profiles and the functionals built on them.

Radial integrals on a model manifold reduce to omega * int f(rho) psi^(N-1) drho.
The decreasing rearrangement lives in the volume coordinate s = sigma * Phi(rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy import optimize

from . import numerics
from .errors import DimensionError, DomainError, MonotoneRequired, NotIntegrable, RangeError
from .manifold import ManifoldModel, phi, phi_inverse_array
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureResult
from .profiles import RadialProfile


def radial_integral(f: Callable, m: ManifoldModel, breakpoints=(), support=math.inf,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                    decay: str = "exponential") -> QuadratureResult:
    """omega * int_0^R f(rho) psi(rho)^(N-1) drho with R = min(support, validity end).

    f may return exact zeros where psi^(N-1) overflows; those products are
    taken as zero rather than inf * 0.
    """
    N = m.dim
    hi = m.validity[1]
    if support > hi:
        raise DomainError(f"{m.label}: integrand support exceeds the validity interval")

    def integrand(r):
        r = np.asarray(r, dtype=float)
        g = np.asarray(f(r), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.asarray(m.psi(r), dtype=float) ** (N - 1)
            out = g * w
        return np.where(g == 0.0, 0.0, out)

    if math.isfinite(support):
        res = numerics.integrate_interval(integrand, 0.0, support, cfg, breakpoints)
    else:
        res = numerics.integrate_semi_infinite(integrand, cfg, breakpoints=breakpoints,
                                               decay=decay)
    return QuadratureResult(m.omega * res.value, m.omega * res.error_estimate, res.evaluations)


def _require_integrable(u: RadialProfile, m: ManifoldModel, p: float) -> None:
    if math.isfinite(m.validity[1]) and u.support_radius <= m.validity[1]:
        return
    if not u.integrable_against(m.volume_growth, p, m.dim):
        raise NotIntegrable(
            f"|{u.label}|^{p:g} is not integrable on {m.label} (volume growth "
            f"rate {m.volume_growth:g})")


def _integrate_profile(f, u: RadialProfile, m: ManifoldModel, cfg, extra=()) -> QuadratureResult:
    decay = "algebraic" if u.decay == "algebraic" else "exponential"
    return radial_integral(f, m, breakpoints=tuple(sorted({*u.breakpoints, *extra})),
                           support=u.support_radius, cfg=cfg, decay=decay)


def lp_integral(u: RadialProfile, m: ManifoldModel, p: float,
                cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int |u|^p dV."""
    if not p > 0:
        raise RangeError("exponent must be positive")
    _require_integrable(u, m, p)
    return _integrate_profile(lambda r: np.abs(u(r)) ** p, u, m, cfg)


def lp_norm(u: RadialProfile, m: ManifoldModel, p: float,
            cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return lp_integral(u, m, p, cfg).value ** (1.0 / p)


def grad_lp_integral(u: RadialProfile, m: ManifoldModel, p: float,
                     cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int |u'(rho)|^p dV; the radial derivative is the full gradient."""
    if not p > 0:
        raise RangeError("exponent must be positive")
    if u.decay == "none" and u.floor == 0.0 and not math.isfinite(m.validity[1]):
        raise NotIntegrable(f"{u.label}: no decay information for the gradient")
    if u.decay == "exponential" and m.volume_growth > 0 and not p * u.rate > m.volume_growth + 0.05:
        raise NotIntegrable(f"|{u.label}'|^{p:g} is not integrable on {m.label}")
    if u.decay == "algebraic" and (m.volume_growth > 0 or not p * (u.rate + 1) > m.dim):
        raise NotIntegrable(f"|{u.label}'|^{p:g} is not integrable on {m.label}")
    if u.decay == "none":
        return QuadratureResult(0.0, 0.0, 0)
    return _integrate_profile(lambda r: np.abs(u.derivative(r)) ** p, u, m, cfg)


def grad_lp_norm(u: RadialProfile, m: ManifoldModel, p: float,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return grad_lp_integral(u, m, p, cfg).value ** (1.0 / p)


def _xlogx_power(x, p):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x ** p * np.log(x)
    return np.where(x > 0, out, 0.0)


def level_crossings(u: RadialProfile, level: float, upper: float) -> list[float]:
    """Radii in (0, upper) where u crosses `level`, one per monotone piece."""
    nodes = sorted({0.0, *(c for c in u.breakpoints if c < upper), upper})
    out = []
    g = lambda r: float(u(r)) - level
    for a, b in zip(nodes[:-1], nodes[1:]):
        ga, gb = g(a), g(b)
        if ga == 0.0 and a > 0:
            out.append(a)
        elif ga * gb < 0:
            out.append(optimize.brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return sorted(set(out))


def _escape_radius(u: RadialProfile, level: float) -> float:
    """A radius beyond which u < level (infinite if the floor is not below level)."""
    if math.isfinite(u.support_radius):
        return u.support_radius
    if u.floor >= level:
        return math.inf
    r = max([1.0, *u.critical]) + 1.0
    while float(u(r)) >= level:
        r *= 2.0
        if r > 1e6:
            return math.inf
    return r


def entropy_split(u: RadialProfile, m: ManifoldModel, p: float,
                  cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> tuple[QuadratureResult, QuadratureResult]:
    """int |u|^p ln|u| dV over {u < 1} and over {u >= 1}, with the u = 1 level set as a breakpoint."""
    _require_integrable(u, m, p)
    top = _escape_radius(u, 1.0)
    cuts = level_crossings(u, 1.0, top) if math.isfinite(top) else []

    def piece(mask_fn):
        return _integrate_profile(
            lambda r: np.where(mask_fn(np.abs(u(r))), _xlogx_power(np.abs(u(r)), p), 0.0),
            u, m, cfg, extra=cuts)

    return piece(lambda x: x < 1.0), piece(lambda x: x >= 1.0)


def entropy_integral(u: RadialProfile, m: ManifoldModel, p: float,
                     cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int |u|^p ln|u| dV, with 0 ln 0 = 0."""
    below, above = entropy_split(u, m, p, cfg)
    return below + above


def distribution_function(u: RadialProfile, m: ManifoldModel, t: float) -> float:
    """mu_u(t) = Vol{|u| > t}, summed over the superlevel shells."""
    if not t > 0:
        raise RangeError("level must be positive")
    top = _escape_radius(u, t)
    if not math.isfinite(top):
        return math.inf
    if u.supremum <= t:
        return 0.0
    edges = [0.0, *level_crossings(u, t, top), top]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a and float(u(0.5 * (a + b))) > t:
            total += phi(m, b) - phi(m, a)
    return m.sigma * total


@dataclass(frozen=True)
class VolumeProfile:
    """v(s) = u*(s), non-increasing in the volume s."""

    value: Callable
    derivative: Callable
    support_bound: float
    label: str = ""

    def __call__(self, s):
        return self.value(s)

    def lp_integral(self, q: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
        """int_0^S v(s)^q ds, through s = e^x for the algebraic ends."""
        f = lambda s: np.abs(self.value(s)) ** q
        if math.isfinite(self.support_bound):
            S = self.support_bound
            return numerics.integrate_interval(lambda y: f(S * y) * S, 0.0, 1.0, cfg)
        return numerics.integrate_real_line_log(f, cfg)

    def lp_norm(self, q: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
        return self.lp_integral(q, cfg).value ** (1.0 / q)


def _support_volume(u: RadialProfile, m: ManifoldModel) -> float:
    R = u.support_radius
    return m.sigma * phi(m, R) if math.isfinite(R) else math.inf


def _monotone_rearrangement(u: RadialProfile, m: ManifoldModel) -> VolumeProfile:
    N, sigma, omega = m.dim, m.sigma, m.omega
    S = _support_volume(u, m)

    def radius(s):
        s = np.asarray(s, dtype=float)
        return phi_inverse_array(m, np.minimum(s, S) / sigma).reshape(s.shape)

    def value(s):
        s = np.asarray(s, dtype=float)
        out = np.asarray(u(radius(s)), dtype=float)
        return np.where(s >= S, 0.0, out)

    def derivative(s):
        s = np.asarray(s, dtype=float)
        r = radius(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(u.derivative(r), dtype=float) / (
                omega * np.asarray(m.psi(r), dtype=float) ** (N - 1))
        return np.where((s >= S) | ~np.isfinite(out), 0.0, out)

    return VolumeProfile(value, derivative, S, f"{u.label}*")


def _general_rearrangement(u: RadialProfile, m: ManifoldModel) -> VolumeProfile:
    top = u.supremum
    S = _support_volume(u, m) if u.floor == 0.0 else math.inf

    def one(s):
        if s <= 0:
            return top
        if s >= S:
            return 0.0
        g = lambda t: distribution_function(u, m, t) - s
        hi = top * (1 - 1e-15)
        if g(hi) > 0:
            return top
        lo = 1e-3 * top
        while g(lo) <= 0:
            lo *= 1e-3
            if lo < 1e-290:
                return 0.0
        # The level bracket can span many decades, so solve in log t.
        y = optimize.brentq(lambda y: g(math.exp(y)), math.log(lo), math.log(hi),
                            xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return math.exp(y)

    def value(s):
        s = np.asarray(s, dtype=float)
        flat = [one(float(x)) for x in s.ravel()]
        return np.array(flat).reshape(s.shape) if s.ndim else flat[0]

    def derivative(s):
        s = float(s)
        h = 1e-6 * max(s, 1e-12)
        return (one(s + h) - one(max(s - h, 0.0))) / (s + h - max(s - h, 0.0))

    return VolumeProfile(value, derivative, S, f"{u.label}*")


def decreasing_rearrangement(u: RadialProfile, m: ManifoldModel,
                             force_general: bool = False) -> VolumeProfile:
    """u*(s) = sup{t > 0 : mu_u(t) > s}.

    Non-increasing profiles are a change of variables s = sigma * Phi(rho).
    Other profiles invert the distribution function level by level, which is
    far slower; `force_general` selects that path even for monotone input.
    """
    if u.nonincreasing and not force_general:
        return _monotone_rearrangement(u, m)
    return _general_rearrangement(u, m)


def _transplant_tail(u: RadialProfile, m: ManifoldModel, target: ManifoldModel):
    """Tail kind and rate of u after moving its level-set volumes to `target`.

    Equal volumes at radii rho (source) and r (target) tie rho to r: linearly
    when both volumes grow exponentially, logarithmically when only the
    source does, exponentially when only the target does.
    """
    g_src, g_dst = m.volume_growth, target.volume_growth
    if u.decay in ("compact", "none") or g_src == g_dst:
        return u.decay, u.rate
    if g_src > 0 and g_dst > 0:
        ratio = g_dst / g_src
        if u.decay == "exponential":
            return "exponential", u.rate * ratio
        if u.decay == "gaussian":
            return "gaussian", u.rate * ratio ** 2
        return u.decay, u.rate
    if g_src > 0:
        # e^(g rho) ~ r^N, so e^(-a rho) becomes r^(-N a / g)
        if u.decay == "exponential":
            return "algebraic", target.dim * u.rate / g_src
        return "algebraic", math.inf
    if u.decay == "algebraic":
        return "exponential", u.rate * g_dst / m.dim
    # faster than any Gaussian once the target volume grows exponentially
    return "gaussian", u.rate


def symmetric_rearrangement(u: RadialProfile, m: ManifoldModel,
                            target: ManifoldModel | None = None) -> RadialProfile:
    """The radial non-increasing transplant of u onto `target` (default: m itself)."""
    target = target or m
    if target.dim != m.dim:
        raise DimensionError(f"cannot transplant from dimension {m.dim} to {target.dim}")
    v = decreasing_rearrangement(u, m)
    N = target.dim
    sig, om = target.sigma, target.omega
    shift = u.floor
    R = (phi_inverse_array(target, v.support_bound / sig)[0]
         if math.isfinite(v.support_bound) else math.inf)

    def value(r):
        return shift + np.asarray(v(sig * np.asarray(phi(target, r), dtype=float)), dtype=float)

    def derivative(r):
        r = np.asarray(r, dtype=float)
        s = sig * np.asarray(phi(target, r), dtype=float)
        dv = np.asarray([v.derivative(x) for x in np.atleast_1d(s).ravel()], dtype=float)
        dv = dv.reshape(np.shape(s)) if np.ndim(s) else dv[0]
        return dv * om * np.asarray(target.psi(r), dtype=float) ** (N - 1)

    if math.isfinite(R):
        decay, rate = "compact", float(R)
    else:
        decay, rate = _transplant_tail(u, m, target)
    return RadialProfile(f"sym({u.label})", value, derivative, decay, rate, True,
                         floor=u.floor, sup=u.supremum)


@dataclass(frozen=True)
class GradientDecomposition:
    """int |grad u|^p dV split into the Euclidean rearrangement energy and the
    correction against k_{N,p}. `hardy_term` is int |v'(s)|^p s^p ds."""

    euclidean_term: float
    correction_term: float
    hardy_term: float
    error_estimate: float

    def __iter__(self) -> Iterator[float]:
        yield self.euclidean_term
        yield self.correction_term

    @property
    def total(self) -> float:
        return self.euclidean_term + self.correction_term


def gradient_decomposition(u: RadialProfile, m: ManifoldModel, p: float,
                           cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> GradientDecomposition:
    """Evaluate both terms in the volume variable, with v' from the chain rule."""
    if p < 2:
        raise RangeError("decomposition needs p >= 2")
    if not u.nonincreasing:
        raise MonotoneRequired(f"{u.label} is not non-increasing")
    grad_lp_integral(u, m, p, cfg)  # integrability gate only
    N, sigma = m.dim, m.sigma
    e = p * (N - 1)
    v = _monotone_rearrangement(u, m)
    scale = (N * sigma) ** p

    def weight(kind):
        def f(s):
            s = np.asarray(s, dtype=float)
            dv = np.abs(v.derivative(s)) ** p
            x = s / sigma
            if kind == "euclid":
                w = x ** (e / N)
            elif kind == "hardy":
                w = s ** p
            else:
                r = phi_inverse_array(m, np.minimum(s, v.support_bound) / sigma).reshape(s.shape)
                with np.errstate(over="ignore"):
                    w = np.asarray(m.psi(r), dtype=float) ** e - x ** (e / N)
            return np.where(dv == 0.0, 0.0, dv * w)
        return f

    def integrate(f):
        if math.isfinite(v.support_bound):
            S = v.support_bound
            nodes = [sigma * phi(m, b) / S for b in u.breakpoints if b < u.support_radius]
            return numerics.integrate_interval(lambda y: f(S * np.asarray(y)) * S, 0.0, 1.0,
                                               cfg, nodes)
        return numerics.integrate_real_line_log(f, cfg)

    euclid = integrate(weight("euclid"))
    corr = integrate(weight("correction"))
    hardy = integrate(weight("hardy"))
    return GradientDecomposition(scale * euclid.value, scale * corr.value, hardy.value,
                                 scale * (euclid.error_estimate + corr.error_estimate))
