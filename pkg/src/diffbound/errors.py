"""Exception hierarchy shared by every module.

Domain errors (bad input, violated preconditions) and budget errors (a
computation that is well defined but too large to carry out) are kept apart
so callers, and the CLI exit codes, can tell them apart.
"""

from __future__ import annotations


class DiffBoundError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DiffBoundError, ValueError):
    """Input outside the domain of an operation."""


class ArityError(DomainError):
    """Multi-indices or points with mismatched arity were combined."""


class NonMonotoneSequence(DomainError):
    """A sequence produced a value smaller than an earlier one."""


class PreconditionFailure(DomainError):
    """A checker was handed data that violates its stated precondition."""


class QuotientError(DomainError):
    """An exact-quotient node did not divide evenly."""


class ParseError(DomainError):
    """Syntax or name error in polynomial text, with a 1-based position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class BudgetExceeded(DiffBoundError):
    """A resource guard tripped before the computation finished.

    ``kind`` names the guard (``"bits"``, ``"steps"``, ``"time"``, ``"terms"``,
    ``"enumeration"``), ``limit`` its configured value, and ``depth`` the
    recursion depth reached when it tripped.
    """

    def __init__(self, kind: str, limit, depth: int = 0, detail: str = ""):
        msg = f"{kind} budget exceeded (limit {limit}, depth {depth})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.kind = kind
        self.limit = limit
        self.depth = depth
        self.detail = detail
