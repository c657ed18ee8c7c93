"""Exception types shared across the package."""

from __future__ import annotations


class MatseqError(Exception):
    """Base class for all package-specific errors."""


class RangeError(MatseqError, ValueError):
    """A value falls outside the dynamic range a token scheme can represent."""


class ParseError(MatseqError, ValueError):
    """A token sequence is malformed.

    `position` is the index of the offending token in the sequence that was
    being parsed (or the length of the sequence when tokens are missing).
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at token {position})")
        self.position = position


class ShapeError(MatseqError, ValueError):
    """Operand shapes are incompatible."""


class NotSymmetricError(MatseqError, ValueError):
    """A symmetric matrix was required."""


class NoConvergenceError(MatseqError, RuntimeError):
    """An iterative routine hit its sweep cap before converging."""


class SingularMatrixError(MatseqError, ValueError):
    """A matrix is singular (or numerically singular) where invertibility is required."""


class ResampleExhaustedError(MatseqError, RuntimeError):
    """Bounded redraws were exhausted while looking for a usable random input."""
