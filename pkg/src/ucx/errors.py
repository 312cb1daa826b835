"""Exception types shared across the package."""


class UcxError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(UcxError):
    """An argument is outside the mathematical domain of the operation."""


class NoSignChangeError(UcxError):
    """Root bracket endpoints do not straddle a sign change."""


class NonFiniteError(UcxError):
    """A function evaluation produced NaN or infinity."""


class BracketFailureError(UcxError):
    """Geometric bracket growth hit its cap without finding a sign change."""


class InfeasibleError(UcxError):
    """The LP has no feasible point (query outside the sampled hull)."""


class UnboundedError(UcxError):
    """The LP objective is unbounded; cannot happen under a simplex row."""


class NegativeCoordinateError(UcxError):
    """Moment coordinates must be nonnegative."""


class NotOnBoundaryError(UcxError):
    """Boundary data requested at a point not on the cone boundary."""


class OutOfRangeError(UcxError):
    """Slice parameter outside the parametrized range."""


class WrongRegimeError(UcxError):
    """Operation called with an exponent from the wrong regime."""


class PartitionMismatchError(UcxError):
    """Two step functions do not share the same atom weights."""


class InfeasibleStartError(UcxError):
    """Brute-force search started at a point outside the cone."""
