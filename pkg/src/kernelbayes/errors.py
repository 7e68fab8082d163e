"""Exception hierarchy shared by all kernelbayes modules."""

from __future__ import annotations


class KernelBayesError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(KernelBayesError):
    """A value violates one of its construction-time invariants."""


class EmptyBlock(ValidationError):
    """An atom partition contains an empty block."""


class OverlappingBlocks(ValidationError):
    """Two blocks of an atom partition share a point."""


class UncoveredPoint(ValidationError):
    """The blocks of an atom partition do not cover every point."""


class UnknownPoint(ValidationError):
    """A point label or index does not belong to the space."""


class NotMeasurable(ValidationError):
    """A set or function is incompatible with the sigma-algebra."""


class NotWellDefined(ValidationError):
    """A construction produced inconsistent data (internal guard)."""


class SpaceMismatch(KernelBayesError):
    """Two values that must share a measurable space do not."""


class MeasurementNotAbsolutelyContinuous(KernelBayesError):
    """A measurement puts mass on an atom the data prior rules out.

    When this happens the posterior would depend on the null-set
    completion of the inference kernel, so the update is refused.
    """

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class SampleOffGrid(KernelBayesError):
    """A second-order sample is supported outside the simplex grid."""


class InfeasiblePlan(KernelBayesError):
    """A transport plan does not satisfy the marginal constraints."""


class ParseError(KernelBayesError):
    """A scenario file or command-line value could not be parsed."""
