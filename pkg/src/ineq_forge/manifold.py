"""Rotationally symmetric model manifolds dr^2 + psi(r)^2 g_sphere.

A model carries its warping function with derivatives up to order three and
owns the volume coordinate Phi(t) = N * int_0^t psi^(N-1), so that the
geodesic ball of radius t has volume sigma_N * Phi(t).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from . import numerics
from .errors import DimensionError, DomainError, NonConvergent, NonFinite, ParseError, RangeError

CONDITION_IDS = ("regularity", "convexity", "slope_ge_one", "c1_limit",
                 "kernel_positive", "attainment_zero")


def sphere_area(N: int) -> float:
    """omega_{N-1}, the area of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def unit_ball_volume(N: int) -> float:
    return sphere_area(N) / N


@dataclass(frozen=True)
class ManifoldModel:
    dim: int
    kind: str
    label: str
    spec: str
    validity: tuple[float, float] = (0.0, math.inf)
    scale: float = 1.0
    coeffs: tuple[float, ...] = ()
    custom_psi: Optional[tuple[Callable, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionError(f"dimension must be at least 2, got {self.dim}")
        if abs(float(self.psi(0.0))) > 1e-9:
            raise DomainError(f"{self.label}: psi(0) must vanish")
        if abs(self.dpsi(0.0, 1) - 1.0) > 1e-9:
            raise DomainError(f"{self.label}: psi'(0) must equal 1")

    @property
    def omega(self) -> float:
        return sphere_area(self.dim)

    @property
    def sigma(self) -> float:
        return unit_ball_volume(self.dim)

    @property
    def volume_growth(self) -> float:
        """Exponential rate of psi^(N-1) at infinity (0 for polynomial growth)."""
        return (self.dim - 1) * self.scale if self.kind == "hyperbolic" else 0.0

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic" and self.scale == 1.0

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "euclidean"

    def check_radius(self, t) -> None:
        lo, hi = self.validity
        arr = np.asarray(t, dtype=float)
        if arr.size and (np.any(arr < lo) or np.any(arr > hi)):
            raise DomainError(f"{self.label}: radius outside validity interval [{lo}, {hi}]")

    def psi(self, t):
        k = self.scale
        if self.kind == "euclidean":
            return np.asarray(t, dtype=float) * 1.0
        if self.kind == "hyperbolic":
            return np.sinh(k * np.asarray(t, dtype=float)) / k
        if self.kind == "poly":
            return _poly(self.coeffs)(np.asarray(t, dtype=float))
        return self.custom_psi[0](t)

    def dpsi(self, t, order: int):
        """Derivative of psi of order 1..3 (analytic for built-in kinds)."""
        k = self.scale
        t_arr = np.asarray(t, dtype=float)
        if self.kind == "euclidean":
            return np.ones_like(t_arr) if order == 1 else np.zeros_like(t_arr)
        if self.kind == "hyperbolic":
            fn = np.cosh if order % 2 == 1 else np.sinh
            return k ** (order - 1) * fn(k * t_arr)
        if self.kind == "poly":
            return _poly(self.coeffs).deriv(order)(t_arr)
        given = self.custom_psi
        if len(given) > order and given[order] is not None:
            return given[order](t)
        if t_arr.ndim:
            return np.array([numerics.differentiate(given[0], float(x), order) for x in t_arr])
        return numerics.differentiate(given[0], float(t), order)


@lru_cache(maxsize=None)
def _poly(coeffs: tuple[float, ...]) -> Polynomial:
    return Polynomial((0.0, *coeffs))


@lru_cache(maxsize=None)
def _poly_phi(coeffs: tuple[float, ...], N: int) -> Polynomial:
    return N * (_poly(coeffs) ** (N - 1)).integ()


@lru_cache(maxsize=None)
def _sinh_power_series(n: int, extra: int = 48) -> np.ndarray:
    """Maclaurin coefficients of sinh(t)^n up to degree n + extra."""
    deg = n + extra
    base = np.zeros(deg + 1)
    for j in range(0, deg + 1, 2):
        if j + 1 <= deg:
            base[j + 1] = 1.0 / math.factorial(j + 1)
    out = np.zeros(deg + 1)
    out[0] = 1.0
    for _ in range(n):
        out = np.convolve(out, base)[: deg + 1]
    return out


def _phi_sinh_unit(t: np.ndarray, N: int) -> np.ndarray:
    """Phi for psi = sinh; explicit antiderivatives, no quadrature."""
    n = N - 1
    if N == 2:
        return 4.0 * np.sinh(t / 2) ** 2
    if N == 3:
        small = t < 0.5
        ts = np.where(small, t, 0.0)
        series = np.zeros_like(t)
        for j in range(1, 12):
            series = series + (2 * ts) ** (2 * j + 1) / math.factorial(2 * j + 1)
        return 0.75 * np.where(small, series, np.sinh(2 * t) - 2 * t)
    if N == 4:
        cm1 = 2.0 * np.sinh(t / 2) ** 2
        return (4.0 / 3.0) * cm1 ** 2 * (cm1 + 3.0)
    small = t < 2.0
    coeffs = _sinh_power_series(n)
    ts = np.where(small, t, 0.0)
    integ = np.zeros_like(t)
    for deg in range(len(coeffs) - 1, -1, -1):
        integ = integ * ts + (coeffs[deg] / (deg + 1) if coeffs[deg] else 0.0)
    series = N * integ * ts
    tl = np.where(small, 2.0, t)
    big = np.zeros_like(t)
    for k in range(n + 1):
        m = n - 2 * k
        term = tl if m == 0 else np.expm1(m * tl) / m
        big = big + math.comb(n, k) * (-1) ** k * term
    big = N * big / 2.0 ** n
    return np.where(small, series, big)


def phi(m: ManifoldModel, t):
    """Volume coordinate Phi(t) = N * int_0^t psi^(N-1)."""
    m.check_radius(t)
    arr = np.asarray(t, dtype=float)
    N = m.dim
    if m.kind == "euclidean":
        out = arr ** N
    elif m.kind == "hyperbolic":
        k = m.scale
        out = _phi_sinh_unit(np.atleast_1d(k * arr), N).reshape(arr.shape) / k ** N
    elif m.kind == "poly":
        out = _poly_phi(m.coeffs, N)(arr)
    else:
        f = lambda x: N * np.asarray(m.psi(x), dtype=float) ** (N - 1)
        flat = [numerics.integrate_interval(f, 0.0, float(x)).value for x in arr.ravel()]
        out = np.array(flat).reshape(arr.shape)
    return float(out) if np.ndim(out) == 0 else out


def phi_inverse(m: ManifoldModel, y: float) -> float:
    if y < 0:
        raise DomainError("volume coordinate must be nonnegative")
    if y == 0:
        return 0.0
    lo, hi = m.validity
    if math.isfinite(hi):
        top = hi
        if y > phi(m, top) * (1 + 1e-12):
            raise DomainError(f"{m.label}: volume {y!r} beyond the validity interval")
    else:
        top = 1.0
        while phi(m, top) < y:
            top *= 2.0
            if top > 1e6:
                raise DomainError(f"{m.label}: cannot bracket Phi^-1({y!r})")
    return numerics.invert_monotone(lambda t: phi(m, t), y, (0.0, top))


def phi_inverse_array(m: ManifoldModel, y) -> np.ndarray:
    """Vectorized Phi^-1: bisection to a tight bracket, then Newton polish."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise DomainError("volume coordinate must be nonnegative")
    if m.kind == "euclidean":
        return y ** (1.0 / m.dim)
    lo_v, hi_v = m.validity
    if math.isfinite(hi_v):
        top = np.full_like(y, hi_v)
        if np.any(y > phi(m, hi_v) * (1 + 1e-12)):
            raise DomainError(f"{m.label}: volume beyond the validity interval")
    else:
        top = np.ones_like(y)
        while np.any(phi(m, top) < y):
            top = np.where(phi(m, top) < y, 2.0 * top, top)
            if np.any(top > 1e150):
                raise DomainError(f"{m.label}: cannot bracket Phi^-1")
    lo = np.zeros_like(y)
    hi = top
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = phi(m, mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t = 0.5 * (lo + hi)
    N = m.dim
    for _ in range(3):
        slope = N * np.asarray(m.psi(t), dtype=float) ** (N - 1)
        with np.errstate(all="ignore"):
            step = np.where(slope > 0, (phi(m, t) - y) / slope, 0.0)
        t = np.clip(t - step, lo, hi)
    return np.where(y == 0, 0.0, t)


def ball_volume(m: ManifoldModel, r) -> float:
    return m.sigma * phi(m, r)


def taylor_a3(m: ManifoldModel) -> float:
    """Coefficient of t^3 in the expansion of psi at the pole."""
    val = float(m.dpsi(0.0, 3)) / 6.0
    if not math.isfinite(val):
        raise NonFinite("third derivative of psi at 0 is not finite")
    return val


def c1_limit(m: ManifoldModel) -> float:
    """lim psi'/psi at infinity, via a 1/t Richardson step on t = 10, 20, 40."""
    if math.isfinite(m.validity[1]):
        raise DomainError(f"{m.label}: psi is only valid on a bounded interval")
    f = {t: float(m.dpsi(t, 1)) / float(m.psi(t)) for t in (10.0, 20.0, 40.0)}
    if not all(math.isfinite(v) for v in f.values()):
        raise NonConvergent(f"{m.label}: psi'/psi not finite at large radius")
    late = 2 * f[40.0] - f[20.0]
    early = 2 * f[20.0] - f[10.0]
    if abs(late - early) > 1e-6 * max(1.0, abs(late)):
        raise NonConvergent(f"{m.label}: psi'/psi does not stabilise ({early!r} vs {late!r})")
    return late


@dataclass(frozen=True)
class ConditionReport:
    condition_id: str
    passed: bool
    witness: Optional[tuple[float, float]]
    scan_interval: tuple[float, float]
    c1_value: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
            "scan_interval": list(self.scan_interval),
            "c1_value": self.c1_value,
        }


def kernel_on_radius(m: ManifoldModel, p: float, t):
    """k_{N,p}(Phi(t)) = psi(t)^(p(N-1)) - Phi(t)^(p(N-1)/N)."""
    N = m.dim
    e = p * (N - 1)
    if m.is_euclidean:
        # Phi = psi^N exactly; skip the rounding noise of the difference
        return np.zeros_like(np.asarray(m.psi(t), dtype=float))
    return np.asarray(m.psi(t), dtype=float) ** e - np.asarray(phi(m, t), dtype=float) ** (e / N)


def attainment_function(m: ManifoldModel, t):
    """psi^(N-1) + K'/(2 K^((N+2)/2)) and K itself, on an array of radii."""
    N = m.dim
    a3 = taylor_a3(m)
    t = np.asarray(t, dtype=float)
    psi = np.asarray(m.psi(t), dtype=float)
    d1, d2, d3 = (np.asarray(m.dpsi(t, k), dtype=float) for k in (1, 2, 3))
    r1 = d1 / psi
    r2 = d2 / psi
    K = r1 ** 2 + r2 / (N - 2) - 6.0 * N ** 2 * a3 / (N ** 2 - 4)
    dK = 2 * r1 * (r2 - r1 ** 2) + (d3 / psi - r2 * r1) / (N - 2)
    with np.errstate(invalid="ignore"):
        ratio = dK / (2.0 * K ** ((N + 2) / 2))
    return psi ** (N - 1) + ratio, psi ** (N - 1) + np.abs(ratio), K


def _first_bad(ts, values, bad):
    idx = np.flatnonzero(bad)
    return None if idx.size == 0 else (float(ts[idx[0]]), float(values[idx[0]]))


def check_conditions(m: ManifoldModel, p: float,
                     scan: tuple[float, float, int]) -> list[ConditionReport]:
    """Grid audit of the sufficient conditions on psi.

    Every check is a certificate on the scan grid only. kernel_positive
    reports the grid point where the kernel is most negative.
    """
    N = m.dim
    if N < 3:
        raise DimensionError("condition audit needs N >= 3")
    if p < N / (N - 1):
        raise RangeError(f"p must be at least N/(N-1) = {N / (N - 1):.6g}")
    t_min, t_max, count = scan
    if t_min <= 0 or t_max <= t_min or int(count) < 2:
        raise RangeError("scan must satisfy 0 < t_min < t_max with at least 2 points")
    m.check_radius([t_min, t_max])
    ts = np.linspace(t_min, t_max, int(count))
    interval = (float(t_min), float(t_max))
    reports = []

    psi = np.asarray(m.psi(ts), dtype=float)
    pole = [(0.0, float(m.psi(0.0))), (0.0, float(m.dpsi(0.0, 1)) - 1.0),
            (0.0, float(m.dpsi(0.0, 2)))]
    bad_pole = next(((t, v) for t, v in pole if abs(v) > 1e-9), None)
    witness = bad_pole or _first_bad(ts, psi, psi <= 0)
    reports.append(ConditionReport("regularity", witness is None, witness, interval))

    d2 = np.asarray(m.dpsi(ts, 2), dtype=float)
    witness = _first_bad(ts, d2, d2 < -1e-12 * np.maximum(1.0, np.abs(psi)))
    reports.append(ConditionReport("convexity", witness is None, witness, interval))

    d1 = np.asarray(m.dpsi(ts, 1), dtype=float)
    witness = _first_bad(ts, d1, d1 < 1.0 - 1e-12)
    reports.append(ConditionReport("slope_ge_one", witness is None, witness, interval))

    try:
        c1 = c1_limit(m)
    except (DomainError, NonConvergent):
        c1 = None
    reports.append(ConditionReport("c1_limit", c1 is not None and c1 > 0, None, interval, c1))

    e = p * (N - 1)
    k = kernel_on_radius(m, p, ts)
    bad = ~(k > 1e-12 * psi ** e)
    witness = None
    if bad.any():
        i = int(np.argmin(np.where(bad, k, np.inf)))
        witness = (float(ts[i]), float(k[i]))
    reports.append(ConditionReport("kernel_positive", witness is None, witness, interval))

    value, scale, K = attainment_function(m, ts)
    if np.any(K <= 0):
        witness = _first_bad(ts, K, K <= 0)
    else:
        witness = _first_bad(ts, value, value < -1e-10 * scale)
    reports.append(ConditionReport("attainment_zero", witness is None, witness, interval))
    return reports


def builtin_manifold(kind: str, N: int) -> ManifoldModel:
    if N < 2:
        raise DimensionError(f"dimension must be at least 2, got {N}")
    if kind == "euclidean":
        return ManifoldModel(N, "euclidean", f"euclidean-{N}", "id")
    if kind == "hyperbolic":
        return ManifoldModel(N, "hyperbolic", f"hyperbolic-{N}", "sinh")
    if kind == "counterexample":
        return ManifoldModel(N, "poly", f"counterexample-{N}", "poly:1,0,1,0,-1@interval:0,1.27",
                             validity=(0.0, 1.27), coeffs=(1.0, 0.0, 1.0, 0.0, -1.0))
    raise ParseError(f"unknown manifold kind {kind!r}")


def custom_manifold(N: int, psi: Callable, *derivatives: Callable, label: str = "custom",
                    validity: tuple[float, float] = (0.0, math.inf)) -> ManifoldModel:
    """Model from an arbitrary warping callable; missing derivatives are
    taken numerically."""
    return ManifoldModel(N, "custom", label, label, validity=validity,
                         custom_psi=(psi, *derivatives))


_SPEC = re.compile(r"^(?P<body>[^@]+?)(?:@interval:(?P<a>[^,]+),(?P<b>.+))?$")


def _first_positive_root(coeffs: tuple[float, ...]) -> float:
    roots = _poly(coeffs).roots()
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 1e-12)
    return real[0] if real else math.inf


def parse_warping(spec: str, N: int) -> ManifoldModel:
    """Parse `sinh`, `sinh:k`, `id` or `poly:c1,...,c5`, optionally followed by
    `@interval:a,b`.

    A polynomial without an explicit interval is restricted to [0, r], where r
    is its first positive root rounded down to two decimals.
    """
    spec = spec.strip()
    match = _SPEC.match(spec)
    if not match:
        raise ParseError(f"cannot parse warping spec {spec!r}")
    body = match.group("body").strip()
    validity = (0.0, math.inf)
    if match.group("a") is not None:
        try:
            validity = (float(match.group("a")), float(match.group("b")))
        except ValueError as exc:
            raise ParseError(f"bad interval in {spec!r}") from exc
        if validity[0] != 0.0 or not validity[1] > 0:
            raise ParseError(f"interval must start at 0 and be nonempty: {spec!r}")
    name, _, args = body.partition(":")
    try:
        values = tuple(float(x) for x in args.split(",")) if args else ()
    except ValueError as exc:
        raise ParseError(f"bad numeric argument in {spec!r}") from exc
    if N < 2:
        raise DimensionError(f"dimension must be at least 2, got {N}")
    if name == "id" and not values:
        return ManifoldModel(N, "euclidean", f"euclidean-{N}", spec, validity=validity)
    if name == "sinh" and len(values) <= 1:
        k = values[0] if values else 1.0
        if not k > 0:
            raise ParseError(f"curvature scale must be positive in {spec!r}")
        label = f"hyperbolic-{N}" if k == 1.0 else f"hyperbolic-k{k:g}-{N}"
        return ManifoldModel(N, "hyperbolic", label, spec, validity=validity, scale=k)
    if name == "poly" and 1 <= len(values) <= 5:
        coeffs = tuple(values)
        if match.group("a") is None:
            root = _first_positive_root(coeffs)
            if math.isfinite(root):
                validity = (0.0, math.floor(root * 100) / 100)
        elif validity[1] > _first_positive_root(coeffs):
            raise ParseError(f"psi is not positive on the declared interval of {spec!r}")
        return ManifoldModel(N, "poly", f"poly[{args}]-{N}", spec, validity=validity,
                             coeffs=coeffs)
    raise ParseError(f"unknown warping spec {spec!r}")
