"""The probability measure dm = G^-1 exp(-rho^2/2) dV on hyperbolic space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import gaussian_c2, gaussian_normalization
from .errors import RangeError
from .manifold import ManifoldModel, builtin_manifold
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureResult
from .profiles import RadialProfile
from .rearrange import radial_integral


@dataclass(frozen=True)
class GaussianMeasure:
    N: int
    G: float
    method: str = "series"

    @classmethod
    def build(cls, N: int, method: str = "series") -> "GaussianMeasure":
        return cls(N, gaussian_normalization(N, method), method)

    @property
    def manifold(self) -> ManifoldModel:
        return builtin_manifold("hyperbolic", self.N)

    def density(self, rho):
        """rho_1 = G^-1 exp(-rho^2/2)."""
        return np.exp(-np.asarray(rho, dtype=float) ** 2 / 2) / self.G


def dm_integral(f: Callable, gm: GaussianMeasure, breakpoints=(),
                cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int f dm for a radial f."""
    return radial_integral(lambda r: np.asarray(f(r), dtype=float) * gm.density(r),
                           gm.manifold, breakpoints=breakpoints, cfg=cfg)


def rho_coth_minus_one(rho):
    """rho coth(rho) - 1, from its Maclaurin series below 1e-3."""
    r = np.asarray(rho, dtype=float)
    small = np.abs(r) < 1e-3
    rs = np.where(small, r, 0.0)
    series = rs ** 2 / 3 - rs ** 4 / 45 + 2 * rs ** 6 / 945
    rl = np.where(small, 1.0, r)
    with np.errstate(over="ignore"):
        direct = rl / np.tanh(rl) - 1.0
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def potential_bracket(N: int, rho):
    """(N-1)(rho coth rho - 1) - N^2(N-1)/(2(N+2)) + log C2."""
    if N < 3:
        raise RangeError("potential bracket is defined for N >= 3")
    return ((N - 1) * rho_coth_minus_one(rho) - N ** 2 * (N - 1) / (2.0 * (N + 2))
            + math.log(gaussian_c2(N)))


def lp_dm(u: RadialProfile, gm: GaussianMeasure, p: float,
          cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    return dm_integral(lambda r: np.abs(u(r)) ** p, gm, u.breakpoints, cfg)


def potential_term(gm: GaussianMeasure, u: RadialProfile,
                   cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int bracket(rho) u^2 dm."""
    return dm_integral(lambda r: potential_bracket(gm.N, r) * np.asarray(u(r)) ** 2,
                       gm, u.breakpoints, cfg)


def dirichlet_dm(u: RadialProfile, gm: GaussianMeasure,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> QuadratureResult:
    """int |u'|^2 dm (no prefactor)."""
    return dm_integral(lambda r: np.asarray(u.derivative(r)) ** 2, gm, u.breakpoints, cfg)


def entropy_dm(u: RadialProfile, gm: GaussianMeasure,
               cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """Ent(u^2) = int u^2 log u^2 dm - log(int u^2 dm) int u^2 dm, with its error bound."""
    def xlogx(r):
        x = np.asarray(u(r), dtype=float) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x > 0, x * np.log(x), 0.0)

    ent = dm_integral(xlogx, gm, u.breakpoints, cfg)
    mass = lp_dm(u, gm, 2.0, cfg)
    value = ent.value - math.log(mass.value) * mass.value
    err = ent.error_estimate + (abs(math.log(mass.value)) + 1.0) * mass.error_estimate
    return value, err
