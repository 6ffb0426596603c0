"""Exception types raised across the package."""


class LoopSpamError(Exception):
    """Base class for all package errors."""


class NotHermitian(LoopSpamError, ValueError):
    pass


class NotPSD(LoopSpamError, ValueError):
    pass


class SingularCorner(LoopSpamError, ArithmeticError):
    """A 3x3 corner of the loop matrix is too close to singular to invert.

    ``corner`` names the offending block ("a" or "d") when known.
    """

    def __init__(self, message, corner=None):
        super().__init__(message)
        self.corner = corner


class InvalidProbability(LoopSpamError, ValueError):
    pass


class InvalidState(LoopSpamError, ValueError):
    pass


class EmptyRecord(LoopSpamError, ValueError):
    pass


class InsufficientTrials(LoopSpamError, ValueError):
    pass


class DegenerateDesign(LoopSpamError, ValueError):
    pass


class ConfigError(LoopSpamError, ValueError):
    """Scenario configuration could not be parsed or validated."""
