"""The InequalityReport record shared by the verify and heat modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .constants import ExponentParams

# JSON/CSV column order; optional parameters are dropped when absent.
REPORT_FIELDS = ("id", "manifold", "N", "p", "alpha", "q", "s", "lambda", "profile",
                 "lhs", "rhs", "deficit", "quad_error", "normalized")
OPTIONAL_FIELDS = ("alpha", "q", "s", "lambda")


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of one inequality in lhs <= rhs orientation."""

    id: str
    manifold: str
    params: ExponentParams
    profile: str
    lhs: float
    rhs: float
    quad_error: float
    normalized: bool = False
    scale: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if self.quad_error < 0 or math.isnan(self.quad_error):
            raise ValueError("quad_error must be nonnegative")

    @property
    def deficit(self) -> float:
        return self.rhs - self.lhs

    @property
    def tolerance(self) -> float:
        return max(1e-8, 10.0 * self.quad_error)

    @property
    def passed(self) -> bool:
        return self.deficit >= -self.tolerance

    def to_dict(self) -> dict:
        par = self.params.to_dict()
        out = {"id": self.id, "manifold": self.manifold, "N": par["N"], "p": par["p"]}
        for key in OPTIONAL_FIELDS:
            if key in par:
                out[key] = par[key]
        out.update(profile=self.profile, lhs=self.lhs, rhs=self.rhs, deficit=self.deficit,
                   quad_error=self.quad_error, normalized=self.normalized)
        return out


def power_error(value: float, error: float, k: float) -> float:
    """First-order error of value**k."""
    if value == 0.0:
        return 0.0 if k >= 1 else math.inf
    return abs(k) * abs(value) ** (k - 1) * error
