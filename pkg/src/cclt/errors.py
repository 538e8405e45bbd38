"""Semantic exception hierarchy.

Every error deliberately raised by this package derives from ``CcltError``,
so callers (in particular the CLI) can distinguish domain failures from
programming bugs.  All concrete classes also derive from ``ValueError`` to
stay friendly to generic callers.
"""

from __future__ import annotations


class CcltError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrixError(CcltError, ValueError):
    """Score matrix fails structural validation (shape, size, finiteness)."""


class DegenerateMatrixError(CcltError, ValueError):
    """The permutation statistic has zero variance, so no bound applies."""


class CapExceededError(CcltError, ValueError):
    """A configured enumeration or permanent size cap was exceeded."""


class ParameterError(CcltError, ValueError):
    """A scalar parameter is outside its documented domain."""


class MatrixParseError(CcltError, ValueError):
    """A matrix file could not be parsed; carries row/column context."""

    def __init__(self, message: str, *, row: int | None = None, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col
