"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GttestError(Exception):
    """Base class for every error raised by the package."""


class DomainError(GttestError, ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(DomainError):
    """A bound was requested outside its validity range."""


class DegenerateSampleError(DomainError):
    """The sample has zero spread where a positive scale is required."""


class UndefinedStatisticError(GttestError, ArithmeticError):
    """The statistic is 0/0 for this sample."""


class ConfigurationError(GttestError, ValueError):
    """Inconsistent or missing configuration."""


class InputFormatError(GttestError, ValueError):
    """A sample file could not be parsed.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(GttestError, RuntimeError):
    """A numerical routine failed to reach its tolerance.

    ``diagnostics`` carries whatever the routine reported (error estimate,
    evaluation counts, status message).
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)
