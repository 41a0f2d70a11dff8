"""Exception hierarchy.

All library errors derive from :class:`EllipticLoewnerError`. The split
between :class:`InputError` and :class:`NumericalError` drives the CLI exit
codes (2 and 3 respectively).
"""


class EllipticLoewnerError(Exception):
    """Base class for every error raised by the package."""


class InputError(EllipticLoewnerError, ValueError):
    """Arguments outside the documented domain."""


class NumericalError(EllipticLoewnerError, ArithmeticError):
    """A computation could not be completed to the required accuracy."""


class DomainError(InputError):
    """Im(tau) below the admissible band, or a function evaluated off its domain."""


class RangeError(InputError):
    """Evaluation requested outside a tabulated range (e.g. a trajectory)."""


class NoBracketError(InputError):
    """Root finder was given an interval without a sign change."""


class PoleError(NumericalError):
    """Argument within ``pole_guard`` of a zero of a theta function."""

    def __init__(self, message, argument=None):
        super().__init__(message)
        self.argument = argument


class TruncationError(NumericalError):
    """q-series failed to converge within the term cap."""


class RealityError(NumericalError):
    """A quantity that must be real came out with a significant imaginary part."""


class DegenerateError(NumericalError):
    """A denominator is too small for the requested quotient."""


class BlowUpError(NumericalError):
    """Integration hit a pole guard and could not be continued."""

    def __init__(self, message, y=None, argument=None):
        super().__init__(message)
        self.y = y
        self.argument = argument


class StepSizeError(NumericalError):
    """Adaptive step size fell below the configured minimum."""


class MaxIterError(NumericalError):
    """Iteration cap reached without convergence."""
