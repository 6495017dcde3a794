"""Exception hierarchy shared by the simulator, the analysis and the CLI."""

from typing import Optional


class EraserError(Exception):
    """Base class for every error raised by eraser-sim."""


class ConfigurationError(EraserError):
    """Schema or configuration problem, optionally tied to a dotted field path."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class DomainError(EraserError, ValueError):
    """An argument lies outside the domain of an operation."""


class UnboundedSpeedError(DomainError):
    """A signal would have to arrive no later than it left."""


class DataError(EraserError):
    """Measured data cannot support the requested computation."""


class TagFileError(DataError):
    """Malformed tag file record."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NoCorrelationError(DataError):
    """No significant coincidence peak between two streams."""


class InsufficientDataError(DataError):
    """Not enough counts to form the requested estimate."""


class FitError(DataError):
    """Fringe fit failed to converge or produced an unphysical result."""


__all__ = [
    "EraserError",
    "ConfigurationError",
    "DomainError",
    "UnboundedSpeedError",
    "DataError",
    "TagFileError",
    "NoCorrelationError",
    "InsufficientDataError",
    "FitError",
]
