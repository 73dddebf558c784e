"""Shared exception types.

Exit-code mapping for the CLI: PreconditionError -> usage (2),
ResourceBudgetError / SearchExhaustedError -> resource (3).  Mathematical
failures (a verifier saying "no") are ordinary return values, never
exceptions.
"""

from __future__ import annotations


class SchreierLabError(Exception):
    """Base class for all package errors."""


class PreconditionError(SchreierLabError, ValueError):
    """An operation was called outside its stated precondition."""


class ResourceBudgetError(SchreierLabError, RuntimeError):
    """A computation would exceed its configured exhaustive budget.

    Raised instead of silently sampling; carries the offending size.
    """

    def __init__(self, message: str, *, required=None, budget=None):
        super().__init__(message)
        self.required = required
        self.budget = budget


class SearchExhaustedError(SchreierLabError, RuntimeError):
    """A bounded search ran out of candidates; carries a diagnostic."""

    def __init__(self, message: str, *, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic
