"""Exception types shared by the library and the command line front end."""

from __future__ import annotations

from fractions import Fraction


class VaccaError(Exception):
    """Base class for all library errors."""


class PrecisionUnreachable(VaccaError):
    """An enclosure is too wide to support the requested output."""


class BudgetExhausted(VaccaError):
    """The term cap was reached before the target error.

    ``best_error`` holds the certified error achievable at the cap.
    """

    def __init__(self, message: str, best_error: Fraction, terms: int):
        super().__init__(message)
        self.best_error = best_error
        self.terms = terms


class UnalignedCut(VaccaError, ValueError):
    """A truncation index splits a sign pair or residue block."""
