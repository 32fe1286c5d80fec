"""Radial test functions u(rho) and the profile mini-grammar.

Grammar (used by the CLI and config files):

    gauss:a        exp(-a rho^2)
    expdecay:a     exp(-a rho)
    bump:R         (1 - (rho/R)^2)_+^2
    powexp:k,a     rho^k exp(-a rho)
    bubble:a,b     (1 + rho^a)^(-b), algebraic tail of order a*b
    table:path     monotone cubic interpolation of a `rho,value` CSV
    const:c        the constant c
    c+SPEC         SPEC shifted up by c (bounded positive test functions)
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ParseError, RangeError

DECAY_KINDS = ("gaussian", "exponential", "algebraic", "compact", "none")


@dataclass(frozen=True)
class RadialProfile:
    """u(rho) >= 0 with its derivative and tail metadata.

    `rate` is the Gaussian or exponential rate, the power k of an algebraic
    tail rho^-k, or the support radius for compact profiles. `floor` is the limit at infinity (nonzero only for
    shifted profiles). `critical` lists radii separating monotone pieces.
    """

    label: str
    value: Callable
    derivative: Callable
    decay: str
    rate: float
    nonincreasing: bool
    critical: tuple[float, ...] = ()
    floor: float = 0.0
    sup: Optional[float] = None

    def __post_init__(self):
        if self.decay not in DECAY_KINDS:
            raise ParseError(f"unknown decay kind {self.decay!r}")

    def __call__(self, rho):
        return self.value(rho)

    @property
    def support_radius(self) -> float:
        if self.decay != "compact" or self.floor != 0.0:
            return math.inf
        return self.rate

    @property
    def breakpoints(self) -> tuple[float, ...]:
        pts = set(self.critical)
        if self.decay == "compact":
            pts.add(self.rate)
        return tuple(sorted(p for p in pts if p > 0))

    @property
    def supremum(self) -> float:
        if self.sup is not None:
            return self.sup
        if self.nonincreasing:
            return float(self.value(0.0))
        cands = [0.0, *self.critical]
        return max(float(self.value(c)) for c in cands)

    def integrable_against(self, growth: float, p: float, dim: Optional[int] = None) -> bool:
        """Whether |u|^p is integrable against a volume growing like e^(growth*rho),
        or like rho^(dim-1) when growth is 0."""
        if self.floor != 0.0 or self.decay == "none":
            return False
        if self.decay in ("gaussian", "compact"):
            return True
        if self.decay == "algebraic":
            return growth == 0.0 and dim is not None and p * self.rate > dim
        if growth == 0.0:
            return self.rate > 0
        return p * self.rate > growth + 0.05

    def scaled(self, c: float) -> "RadialProfile":
        v, d = self.value, self.derivative
        return replace(self, label=f"{c!r}*{self.label}",
                       value=lambda r: c * v(r), derivative=lambda r: c * d(r),
                       floor=c * self.floor, sup=None if self.sup is None else c * self.sup)

    def shifted(self, c: float) -> "RadialProfile":
        if c < 0:
            raise RangeError("shift must be nonnegative")
        v = self.value
        return replace(self, label=f"{c!r}+{self.label}", value=lambda r: c + v(r),
                       floor=self.floor + c, sup=None if self.sup is None else c + self.sup)


def _arr(r):
    return np.asarray(r, dtype=float)


def gauss(a: float) -> RadialProfile:
    if not a > 0:
        raise RangeError("gauss rate must be positive")
    return RadialProfile(f"gauss:{a!r}", lambda r: np.exp(-a * _arr(r) ** 2),
                         lambda r: -2 * a * _arr(r) * np.exp(-a * _arr(r) ** 2),
                         "gaussian", a, True)


def expdecay(a: float) -> RadialProfile:
    if not a > 0:
        raise RangeError("expdecay rate must be positive")
    return RadialProfile(f"expdecay:{a!r}", lambda r: np.exp(-a * _arr(r)),
                         lambda r: -a * np.exp(-a * _arr(r)), "exponential", a, True)


def bump(R: float) -> RadialProfile:
    if not R > 0:
        raise RangeError("bump radius must be positive")

    def value(r):
        x = np.clip(_arr(r) / R, 0.0, 1.0)
        return (1 - x ** 2) ** 2

    def derivative(r):
        x = np.clip(_arr(r) / R, 0.0, 1.0)
        return -4.0 * x / R * (1 - x ** 2)

    return RadialProfile(f"bump:{R!r}", value, derivative, "compact", R, True)


def powexp(k: float, a: float) -> RadialProfile:
    if not (k >= 1 and a > 0):
        raise RangeError("powexp needs k >= 1 and a > 0")
    return RadialProfile(f"powexp:{k!r},{a!r}", lambda r: _arr(r) ** k * np.exp(-a * _arr(r)),
                         lambda r: (k * _arr(r) ** (k - 1) - a * _arr(r) ** k) * np.exp(-a * _arr(r)),
                         "exponential", a, False, critical=(k / a,),
                         sup=(k / a) ** k * math.exp(-k))


def bubble(a: float, b: float) -> RadialProfile:
    if not (a >= 1 and b > 0):
        raise RangeError("bubble needs a >= 1 and b > 0")

    def value(r):
        return (1 + _arr(r) ** a) ** (-b)

    def derivative(r):
        r = _arr(r)
        return -a * b * r ** (a - 1) * (1 + r ** a) ** (-b - 1)

    return RadialProfile(f"bubble:{a!r},{b!r}", value, derivative, "algebraic", a * b, True)


def constant(c: float) -> RadialProfile:
    if c < 0:
        raise RangeError("constant profile must be nonnegative")
    return RadialProfile(f"const:{c!r}", lambda r: np.full(np.shape(r), float(c)) if np.ndim(r) else float(c),
                         lambda r: np.zeros(np.shape(r)) if np.ndim(r) else 0.0,
                         "none", 0.0, True, floor=float(c), sup=float(c))


def linear_ramp(R: float = 1.0) -> RadialProfile:
    """max(0, 1 - rho/R)."""
    return RadialProfile(f"ramp:{R!r}", lambda r: np.clip(1 - _arr(r) / R, 0.0, 1.0),
                         lambda r: np.where(_arr(r) < R, -1.0 / R, 0.0), "compact", R, True)


def plateau(inner: float = 1.0, outer: float = 2.0) -> RadialProfile:
    """1 on [0, inner], linear down to 0 at outer."""
    width = outer - inner
    return RadialProfile(
        f"plateau:{inner!r},{outer!r}",
        lambda r: np.clip((outer - _arr(r)) / width, 0.0, 1.0),
        lambda r: np.where((_arr(r) > inner) & (_arr(r) < outer), -1.0 / width, 0.0),
        "compact", outer, True, critical=(inner,))


def indicator(R: float = 1.0) -> RadialProfile:
    """1 on [0, R], 0 beyond; its derivative is taken as 0 almost everywhere."""
    return RadialProfile(f"indicator:{R!r}", lambda r: np.where(_arr(r) <= R, 1.0, 0.0),
                         lambda r: np.zeros(np.shape(r)), "compact", R, True)


def table(path: str) -> RadialProfile:
    rhos, vals = [], []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["rho", "value"]:
                raise ParseError(f"{path}: header must be 'rho,value'")
            for row in reader:
                if not row:
                    continue
                rhos.append(float(row[0]))
                vals.append(float(row[1]))
    except ParseError:
        raise
    except OSError as exc:
        raise ParseError(f"cannot read table {path!r}: {exc}") from exc
    except (ValueError, IndexError, StopIteration) as exc:
        raise ParseError(f"malformed table {path!r}") from exc
    x, y = np.array(rhos), np.array(vals)
    if x.size < 2 or x[0] != 0.0 or np.any(np.diff(x) <= 0):
        raise ParseError(f"{path}: rho must start at 0 and increase strictly")
    if np.any(y < 0) or y[-1] != 0.0:
        raise ParseError(f"{path}: values must be nonnegative and end at 0")
    interp = PchipInterpolator(x, y, extrapolate=False)
    slope = interp.derivative()
    R = float(x[-1])

    def value(r):
        out = interp(np.clip(_arr(r), 0.0, R))
        return np.where(_arr(r) >= R, 0.0, out)

    def derivative(r):
        return np.where(_arr(r) >= R, 0.0, slope(np.clip(_arr(r), 0.0, R)))

    diffs = np.diff(y)
    turns = tuple(float(x[i]) for i in range(1, len(x) - 1) if diffs[i - 1] * diffs[i] < 0)
    return RadialProfile(f"table:{path}", value, derivative, "compact", R,
                         bool(np.all(diffs <= 0)), critical=turns, sup=float(y.max()))


def _numbers(args: str, count: int, spec: str) -> list[float]:
    try:
        out = [float(x) for x in args.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad numeric argument in profile {spec!r}") from exc
    if len(out) != count:
        raise ParseError(f"profile {spec!r} expects {count} argument(s)")
    return out


def parse_profile(spec: str) -> RadialProfile:
    spec = spec.strip()
    head, plus, rest = spec.partition("+")
    if plus:
        try:
            shift = float(head)
        except ValueError as exc:
            raise ParseError(f"unknown profile spec {spec!r}") from exc
        return parse_profile(rest).shifted(shift)
    name, _, args = spec.partition(":")
    try:
        if name == "gauss":
            return gauss(*_numbers(args, 1, spec))
        if name == "expdecay":
            return expdecay(*_numbers(args, 1, spec))
        if name == "bump":
            return bump(*_numbers(args, 1, spec))
        if name == "powexp":
            return powexp(*_numbers(args, 2, spec))
        if name == "bubble":
            return bubble(*_numbers(args, 2, spec))
        if name == "const":
            return constant(*_numbers(args, 1, spec))
        if name == "table" and args:
            return table(args)
    except RangeError as exc:
        raise ParseError(f"invalid profile {spec!r}: {exc}") from exc
    raise ParseError(f"unknown profile spec {spec!r}")
