"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """A config value or range is invalid (empty range, bad variance, ...)."""


class NumericalError(ArithmeticError):
    """A numerical precondition failed beyond tolerance (e.g. non-PSD matrix)."""


class DegenerateInputError(ValueError):
    """An input is degenerate for the requested operation (e.g. zero channel)."""
