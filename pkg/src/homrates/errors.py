"""Exception types raised across the package."""


class HomRatesError(Exception):
    """Base class for all package errors."""


class StateError(HomRatesError, ValueError):
    """Invalid Fock state construction (duplicate keys, negative counts, excess norm)."""


class CapacityError(HomRatesError):
    """A requested truncation or term count exceeds the configured bound."""

    def __init__(self, message: str, requested: int, limit: int):
        super().__init__(message)
        self.requested = requested
        self.limit = limit


class UndefinedRatioError(HomRatesError, ZeroDivisionError):
    """A correlation ratio was requested on a state with zero denominator."""

    def __init__(self, message: str, denominator: float = 0.0):
        super().__init__(message)
        self.denominator = denominator


class UndefinedVisibilityError(HomRatesError, ZeroDivisionError):
    """Visibility requested with a vanishing maximum (only happens at zero gain)."""


class SweepPointError(HomRatesError):
    """Wraps a failure at one sweep point, tagging the offending gain."""

    def __init__(self, gamma: float, cause: Exception):
        super().__init__(f"sweep point gamma={gamma!r} failed: {cause}")
        self.gamma = gamma
        self.cause = cause


class SimulationError(HomRatesError, FloatingPointError):
    """Monte Carlo draws produced non-finite values."""
