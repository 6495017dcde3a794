"""Validation utilities and exit codes for the eraser CLI."""

from enum import IntEnum
from pathlib import Path
from typing import Optional

from rich.console import Console

from core.errors import ConfigurationError, DataError, DomainError, EraserError


class ExitCode(IntEnum):
    OK = 0
    SCHEMA = 2
    DATA = 3
    VERIFICATION = 4


class ValidationError(Exception):
    """Custom validation error."""

    pass


def exit_code_for(error: Exception) -> ExitCode:
    """Map a library error onto its exit code class."""
    if isinstance(error, (ConfigurationError, ValidationError)):
        return ExitCode.SCHEMA
    if isinstance(error, DataError):
        return ExitCode.DATA
    if isinstance(error, (DomainError, EraserError)):
        return ExitCode.SCHEMA
    return ExitCode.DATA


class Validator:
    """Input validation utilities."""

    def __init__(self):
        self.console = Console()

    def validate_file_exists(self, filepath: str) -> Path:
        """Validate that file exists."""
        path = Path(filepath)
        if not path.exists():
            raise ValidationError(f"File not found: {filepath}")
        if not path.is_file():
            raise ValidationError(f"Path is not a file: {filepath}")
        return path.absolute()

    def validate_run_dir(self, directory: str) -> Path:
        """A simulate output directory: manifest plus the scan streams."""
        path = Path(directory)
        if not path.is_dir():
            raise ValidationError(f"Run directory not found: {directory}")
        if not (path / "manifest.json").is_file():
            raise ValidationError(f"No manifest.json in {directory}")
        for name in ("system.tags", "environment.tags"):
            if not (path / "scan" / name).is_file():
                raise ValidationError(f"Missing scan/{name} in {directory}")
        return path.absolute()

    def validate_window(self, window_ps: Optional[int]) -> Optional[int]:
        if window_ps is not None and window_ps <= 0:
            raise ValidationError("Coincidence window must be a positive number of picoseconds")
        return window_ps

    def validate_fractions(self, raw: Optional[str]) -> Optional[list]:
        """Comma-separated drive fractions in [0, 1]."""
        if raw is None:
            return None
        try:
            values = [float(part) for part in raw.split(",") if part.strip()]
        except ValueError as exc:
            raise ValidationError(f"Invalid drive fraction list '{raw}'") from exc
        if not values or any(not 0.0 <= v <= 1.0 for v in values):
            raise ValidationError("Drive fractions must lie in [0, 1]")
        return values
