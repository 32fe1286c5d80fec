"""Scalar numerics: adaptive quadrature on [0, inf), finite differences,
monotone inversion, bounded minimization and the error function."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize, special

from .errors import BracketError, NonConvergent, NonFinite, RangeError

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point layout: negative nodes, centre, positive nodes.
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_KW = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_GW = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GW[_i] = _w
    _GW[14 - _i] = _w
_GW[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000
    tail_cut: float = 40.0
    max_cut: float = 700.0

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise RangeError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise RangeError("max_subdivisions must be at least 1")
        if not self.tail_cut > 0:
            raise RangeError("tail_cut must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value,
                                self.error_estimate + other.error_estimate,
                                self.evaluations + other.evaluations)


DEFAULT_QUADRATURE = QuadratureConfig()


def evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to a scalar loop when f is not
    vectorized. Non-finite samples raise NonFinite."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        try:
            y = np.asarray(f(x), dtype=float)
        except (TypeError, ValueError):
            y = None
        if y is None or y.shape != x.shape:
            y = np.array([float(f(float(xi))) for xi in x.ravel()]).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)]
        raise NonFinite(f"integrand not finite at x={bad.ravel()[0]!r}")
    return y


def _panel(f, a, b):
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    fx = evaluate(f, centre + half * _NODES)
    k15 = float(np.dot(_KW, fx))
    g7 = float(np.dot(_GW, fx))
    mean = k15 * 0.5
    resabs = float(np.dot(_KW, np.abs(fx))) * abs(half)
    resasc = float(np.dot(_KW, np.abs(fx - mean))) * abs(half)
    err = abs((k15 - g7) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return k15 * half, err


def integrate_interval(f: Callable, a: float, b: float,
                       cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                       breakpoints: Iterable[float] = ()) -> QuadratureResult:
    """Globally adaptive G7/K15 quadrature of f over [a, b]."""
    if b < a:
        r = integrate_interval(f, b, a, cfg, breakpoints)
        return QuadratureResult(-r.value, r.error_estimate, r.evaluations)
    if b == a:
        return QuadratureResult(0.0, 0.0, 0)
    edges = sorted({a, b, *(x for x in breakpoints if a < x < b)})
    heap: list = []
    frozen: list = []
    evals = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _panel(f, lo, hi)
        evals += 15
        heapq.heappush(heap, (-e, lo, hi, v))
    while True:
        values = [item[3] for item in heap] + [item[3] for item in frozen]
        errors = [-item[0] for item in heap] + [-item[0] for item in frozen]
        total = math.fsum(values)
        err = math.fsum(errors)
        if err <= max(cfg.abs_tol, cfg.rel_tol * abs(total)) or not heap:
            return QuadratureResult(total, err, evals)
        if len(heap) + len(frozen) >= cfg.max_subdivisions:
            raise NonConvergent(
                f"quadrature on [{a}, {b}] exhausted {cfg.max_subdivisions} "
                f"subdivisions (error {err:.3g}, value {total:.6g})")
        item = heapq.heappop(heap)
        _, lo, hi, _ = item
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi or (hi - lo) < 64 * _EPS * max(1.0, abs(mid)):
            frozen.append(item)
            continue
        for s, t in ((lo, mid), (mid, hi)):
            v, e = _panel(f, s, t)
            evals += 15
            heapq.heappush(heap, (-e, s, t, v))


def _tail_bound(f, T, decay_rate):
    probe = evaluate(f, np.array([T, T + 0.5, T + 1.0]))
    peak = float(np.max(np.abs(probe)))
    if peak == 0.0:
        return 0.0
    rate = decay_rate
    if rate is None:
        if probe[0] == 0.0 or probe[2] == 0.0:
            return peak
        ratio = abs(probe[0] / probe[2])
        if ratio <= 1.0:
            return math.inf
        rate = math.log(ratio)
    return peak / rate


def integrate_semi_infinite(f: Callable, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                            *, breakpoints: Sequence[float] = (),
                            decay_rate: float | None = None,
                            decay: str = "exponential") -> QuadratureResult:
    """Integrate f over [0, inf).

    Exponential tails: integrate [0, T] adaptively, then keep extending T
    until |f(T)|/rate is below a tenth of the tolerance; the final tail
    bound is added to the error estimate. Algebraic tails: [T, inf) is
    mapped by r = T e^x, which turns a power-law tail into an exponential one.
    """
    T = max([cfg.tail_cut, *(1.25 * b for b in breakpoints)])
    result = integrate_interval(f, 0.0, T, cfg, breakpoints)
    if decay == "algebraic":
        def mapped(x):
            r = T * np.exp(np.asarray(x, dtype=float))
            return evaluate(f, r) * r
        return result + integrate_semi_infinite(mapped, cfg)
    if decay != "exponential":
        raise RangeError(f"unknown decay kind {decay!r}")
    while True:
        bound = _tail_bound(f, T, decay_rate)
        target = 0.1 * max(cfg.abs_tol, cfg.rel_tol * abs(result.value))
        if bound <= target:
            return QuadratureResult(result.value, result.error_estimate + bound,
                                    result.evaluations + 3)
        if T >= cfg.max_cut:
            raise NonConvergent(
                f"integrand tail not below tolerance by r={T:g} (bound {bound:.3g})")
        T_next = min(2.0 * T, cfg.max_cut)
        result = result + integrate_interval(f, T, T_next, cfg)
        T = T_next


def integrate_real_line_log(f: Callable, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """Integrate f over (0, inf) through s = e^x, splitting at s = 1.

    Suited to integrands with algebraic behaviour at both ends, such as
    functions of the volume coordinate."""
    def right(x):
        x = np.asarray(x, dtype=float)
        return evaluate(f, np.exp(x)) * np.exp(x)

    def left(y):
        y = np.asarray(y, dtype=float)
        return evaluate(f, np.exp(-y)) * np.exp(-y)

    return integrate_semi_infinite(right, cfg) + integrate_semi_infinite(left, cfg)


_STENCILS = {
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([-0.5, 1.0, -1.0, 0.5])),
}


def differentiate(f: Callable, x: float, order: int = 1) -> float:
    """Central difference of the given order with one Richardson step.

    The base step is eps**(1/(order+4)) * max(1, |x|): after Richardson
    the truncation error is O(h^4) while round-off grows like eps/h^order.
    """
    if order not in _STENCILS:
        raise RangeError("order must be 1, 2 or 3")
    offsets, weights = _STENCILS[order]
    h = _EPS ** (1.0 / (order + 4)) * max(1.0, abs(x))

    def stencil(step):
        # Round the step so x + step is exactly representable.
        step = (x + step) - x
        samples = np.array([float(f(x + k * step)) for k in offsets])
        if not np.all(np.isfinite(samples)):
            raise NonFinite(f"non-finite sample while differentiating at x={x!r}")
        return float(np.dot(weights, samples)) / step ** order

    coarse = stencil(h)
    fine = stencil(h / 2)
    return (4.0 * fine - coarse) / 3.0


def invert_monotone(f: Callable, y: float, bracket: tuple[float, float],
                    tol: float = 1e-12) -> float:
    """Solve f(x) = y for strictly increasing f on bracket = (a, b)."""
    a, b = bracket
    fa, fb = float(f(a)), float(f(b))
    scale = max(1.0, abs(y))
    if y < fa - tol * scale or y > fb + tol * scale:
        raise BracketError(f"target {y!r} outside [{fa!r}, {fb!r}]")
    if abs(fa - y) <= tol * scale:
        return a
    if abs(fb - y) <= tol * scale:
        return b
    x = optimize.brentq(lambda t: f(t) - y, a, b, xtol=1e-300, rtol=4 * _EPS, maxiter=400)
    best = x
    best_res = abs(f(x) - y)
    for cand in (np.nextafter(x, a), np.nextafter(x, b)):
        res = abs(f(cand) - y)
        if res < best_res:
            best, best_res = float(cand), res
    if best_res > tol * scale:
        raise NonConvergent(f"inversion residual {best_res:.3g} exceeds tolerance at y={y!r}")
    return best


def minimize_scalar(f: Callable, grid: tuple[float, float, int]) -> tuple[float, float]:
    """Grid scan followed by bounded Brent refinement around the best node.

    The refined point replaces the grid point only if it is lower, so the
    returned minimum never exceeds any grid value.
    """
    t_min, t_max, count = grid
    count = int(count)
    if count < 3:
        raise RangeError("grid needs at least 3 points")
    ts = np.linspace(t_min, t_max, count)
    vals = np.array([float(f(t)) for t in ts])
    if not np.all(np.isfinite(vals)):
        raise NonFinite(f"objective not finite at t={ts[~np.isfinite(vals)][0]!r}")
    i = int(np.argmin(vals))
    best_t, best_v = float(ts[i]), float(vals[i])
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, count - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12 * max(1.0, abs(best_t))})
        if np.isfinite(res.fun) and res.fun < best_v:
            best_t, best_v = float(res.x), float(res.fun)
    return best_t, best_v


def erf(x):
    """Error function; scalars go through math.erf, arrays through scipy."""
    if np.ndim(x) == 0:
        return math.erf(float(x))
    return special.erf(np.asarray(x, dtype=float))
