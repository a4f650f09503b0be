"""Exception hierarchy shared across the package.

Errors fall into three rough groups, which the command line maps onto
distinct exit codes:

* bad input (``DomainError`` and friends),
* precision failures (``PrecisionExhausted``),
* honest refusals to answer (``Inconclusive``).
"""


class PisotkitError(Exception):
    """Base class for every package-specific error."""


class DomainError(PisotkitError, ValueError):
    """Input is outside the documented domain of an operation."""


class NotSquarefree(DomainError):
    """Polynomial shares a nonconstant factor with its derivative."""


class NonMonicRecurrence(DomainError):
    """Recurrence generation requires a leading coefficient of 1."""


class NotIncreasing(DomainError):
    """Sequence terms fail the required strict increase."""


class DegenerateTheta(DomainError):
    """Operation requires an irrational shift but received a rational one."""


class OutOfRange(DomainError):
    """Sample values fall outside the required interval."""


class InsufficientData(DomainError):
    """Too few samples to support the requested statistic."""


class PrecisionExhausted(PisotkitError):
    """Escalation reached the configured precision ceiling without certifying."""


class BoundaryAmbiguous(PrecisionExhausted):
    """A value could not be certified on one side of an integer boundary.

    Carries enough context to report which multiple failed and how close
    it sits to the boundary.
    """

    def __init__(self, message, nearest_integer=None, distance_bound=None):
        super().__init__(message)
        self.nearest_integer = nearest_integer
        self.distance_bound = distance_bound


class Inconclusive(PisotkitError):
    """Certification failed in both directions at the precision ceiling."""
