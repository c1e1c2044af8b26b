"""Exception hierarchy shared by every boolcube module."""


class BoolcubeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BoolcubeError, ValueError):
    """An argument lies outside the domain on which a quantity is defined."""


class DimensionMismatch(BoolcubeError, ValueError):
    pass


class DimensionTooLarge(BoolcubeError, ValueError):
    pass


class CoordinateOutOfRange(BoolcubeError, ValueError):
    pass


class NotBoolean(BoolcubeError, ValueError):
    """A Fourier vector does not reconstruct to a {-1, +1}-valued table."""


class ParseError(BoolcubeError, ValueError):
    """Malformed truth-table or grid string; ``position`` is a 0-based offset."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class InvalidDistribution(BoolcubeError, ValueError):
    pass


class ThetaOutOfRange(DomainError):
    pass


class NumericalInconsistency(BoolcubeError, ArithmeticError):
    pass


class DegreeCollapseViolation(NumericalInconsistency):
    """The expanded quartic/quintic coefficients of the cubic did not cancel."""


class SignPatternViolation(NumericalInconsistency):
    pass


class BudgetExceeded(BoolcubeError, RuntimeError):
    pass


class NonDictatorMaximizer(BoolcubeError, RuntimeError):
    """A pair reached the source mutual information without being a dictator pair."""

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)
