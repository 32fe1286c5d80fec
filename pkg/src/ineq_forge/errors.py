"""Exception hierarchy shared by every module."""


class IneqError(Exception):
    """Base class for all package errors."""


class NonConvergent(IneqError):
    pass


NotConvergent = NonConvergent


class NonFinite(IneqError, ArithmeticError):
    pass


class BracketError(IneqError, ValueError):
    pass


class DomainError(IneqError, ValueError):
    pass


class DimensionError(IneqError, ValueError):
    pass


class RangeError(IneqError, ValueError):
    pass


class NotIntegrable(IneqError):
    pass


class MonotoneRequired(IneqError, ValueError):
    pass


class ConditionViolated(IneqError):
    """A sufficient condition on the warping function fails on the scan grid."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BranchMismatch(IneqError, ValueError):
    pass


class LogArgumentNonpositive(IneqError, ValueError):
    pass


class ParseError(IneqError, ValueError):
    pass
