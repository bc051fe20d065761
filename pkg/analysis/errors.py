"""
Errors Module
Exception hierarchy shared by the numerical layer, the experiments and the CLI.
"""

from typing import Optional


class HaarLabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(HaarLabError):
    """Invalid parameter or configuration value.

    Attributes:
        key: Name of the offending parameter or config key (may be None)
    """

    def __init__(self, key: Optional[str], message: str):
        self.key = key
        if key:
            message = f"{key}: {message}"
        super().__init__(message)


class DomainError(HaarLabError):
    """An object does not fit the grid it is used on (resolution, window, signs)."""


class ConstructionError(HaarLabError):
    """A filter or atom could not be built to the required accuracy."""

    def __init__(self, message: str, condition: Optional[float] = None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition number {condition:.3e})"
        super().__init__(message)


class FittingError(HaarLabError):
    """A slope fit was requested on insufficient or degenerate data."""


class DegenerateInputError(HaarLabError):
    """Every candidate norm vanished, so no ratio can be formed."""
