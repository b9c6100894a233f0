"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations


class BlowspecError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(BlowspecError, ValueError):
    """An argument violates a documented precondition."""


class GraphFormatError(ValidationError):
    """Input text could not be decoded into a simple graph."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EigenpairInputError(ValidationError):
    """A supplied matrix eigenpair does not satisfy its residual bound."""


class NumericError(BlowspecError, ArithmeticError):
    """A dense eigensolve failed to converge or returned an unusable result."""

    def __init__(self, message: str, matrix=None):
        self.matrix = matrix
        super().__init__(message)


class CertificationError(BlowspecError):
    """A constructed tensor eigenpair failed its residual check.

    This never happens for correct input; it signals a bug or a violated
    mathematical claim and must not be swallowed.
    """


class VerificationError(BlowspecError):
    """A reported eigenvalue could not be re-certified from its witness."""
