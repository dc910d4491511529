"""Exception types shared across the package."""


class YRelayError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(YRelayError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class RankDeficient(YRelayError, ArithmeticError):
    """Matrix failed the conditioning check (sigma_min/sigma_max below threshold)."""


class GenerationFailed(YRelayError, RuntimeError):
    """Random generation exhausted its retry budget."""


class NonIntegral(YRelayError, ValueError):
    """A scaled DoF entry is not an integer for the given extension factor."""


class Infeasible(YRelayError, ValueError):
    """Requested DoF vector does not fit the relay signal space.

    `excess` is the number of slot symbols by which the layout overflows
    the length-T*N relay word.
    """

    def __init__(self, message, excess):
        super().__init__(message)
        self.excess = excess


class ModeUnavailable(YRelayError, ValueError):
    """Requested relay decoding mode lacks a required input."""


class ScalarUnderflow(YRelayError, ArithmeticError):
    """A recovery scale factor is too small to divide by."""


class TooLarge(YRelayError, ValueError):
    """Problem size exceeds the guard for exhaustive enumeration."""


class Underdetermined(YRelayError, ValueError):
    """Not enough data points for the requested fit."""


class LpError(YRelayError, RuntimeError):
    """Linear program is malformed or unbounded."""
