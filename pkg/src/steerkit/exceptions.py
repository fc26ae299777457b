"""Exception hierarchy; each class carries the CLI exit code it maps to."""
from typing import Any


class SteerkitError(Exception):
    """Base class for toolkit errors."""

    exit_code = 1


class VerificationError(SteerkitError):
    """A cross-check between independent computations disagreed."""

    exit_code = 1


class DomainError(SteerkitError, ValueError):
    """Input outside the domain of an operation."""

    exit_code = 2


class ResourceError(SteerkitError):
    """Request exceeds a hard resource guard (e.g. too many strategies)."""

    exit_code = 2


class NumericError(SteerkitError, ArithmeticError):
    """A numerical routine failed to converge or to meet its error estimate."""

    exit_code = 3

    def __init__(self, message: str, residuals: dict[str, Any] | None = None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class AmbiguousResultError(NumericError):
    """Feasibility verdict fell inside the numerically ambiguous band."""

    exit_code = 4
