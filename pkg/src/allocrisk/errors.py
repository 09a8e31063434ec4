"""Exception hierarchy shared by all allocrisk modules."""


class AllocRiskError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AllocRiskError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SpecValidationError(AllocRiskError, ValueError):
    """A sequence specification violates its invariants."""


class NoSignChangeError(AllocRiskError, ValueError):
    """A root-finding bracket does not enclose a sign change."""


class NonFiniteError(AllocRiskError, ArithmeticError):
    """A function returned NaN or infinity where a finite value is required."""


class DivergenceError(AllocRiskError, ArithmeticError):
    """A series failed the decrease checks needed to bound its tail."""


class EmptyAllocationError(AllocRiskError, ValueError):
    """An allocation with no positive entry was passed to a risk solver."""


class InfiniteRiskError(AllocRiskError):
    """A coordinate that matters for the minimax risk received no budget.

    For ellipsoids the saddle-point risk formula only applies when every
    coordinate above the activation threshold has a positive measurement
    count; otherwise no linear estimator attains the formula's value.
    """


class TruncationError(AllocRiskError):
    """The truncation dimension D is too small for the requested computation."""
