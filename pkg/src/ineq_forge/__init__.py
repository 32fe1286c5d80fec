"""Sharp constants, correction kernels and numerical checks of Sobolev-type
inequalities on hyperbolic space and rotationally symmetric model manifolds."""

from .constants import (ExponentParams, correction_lower_constant, gaussian_c2,
                        gaussian_normalization, gn_constant, lambda_log, log_sobolev_constant,
                        poincare_constant, sharp_sobolev_constant)
from .errors import (BranchMismatch, ConditionViolated, DimensionError, DomainError, IneqError,
                     LogArgumentNonpositive, MonotoneRequired, NonConvergent, NotIntegrable,
                     ParseError, RangeError)
from .gaussmeasure import GaussianMeasure
from .heat import HeatKernelSpec, heat_kernel
from .manifold import ManifoldModel, builtin_manifold, check_conditions, parse_warping
from .numerics import QuadratureConfig
from .profiles import RadialProfile, parse_profile
from .rearrange import decreasing_rearrangement, gradient_decomposition, symmetric_rearrangement
from .reports import InequalityReport
from .verify import InequalityId, holder_entropy_bound, verify, verify_suite

__version__ = "0.1.0"

__all__ = [
    "BranchMismatch", "ConditionViolated", "DimensionError", "DomainError", "ExponentParams",
    "GaussianMeasure", "HeatKernelSpec", "IneqError", "InequalityId", "InequalityReport",
    "LogArgumentNonpositive", "ManifoldModel", "MonotoneRequired", "NonConvergent",
    "NotIntegrable", "ParseError", "QuadratureConfig", "RadialProfile", "RangeError",
    "builtin_manifold", "check_conditions", "correction_lower_constant",
    "decreasing_rearrangement", "gaussian_c2", "gaussian_normalization", "gn_constant",
    "gradient_decomposition", "heat_kernel", "holder_entropy_bound", "lambda_log",
    "log_sobolev_constant", "parse_profile", "parse_warping", "poincare_constant",
    "sharp_sobolev_constant", "symmetric_rearrangement", "verify", "verify_suite",
]
