"""Effective bounds for differential polynomial systems."""

from .budget import Budget
from .chainbound import T_bound, t_bound
from .errors import (
    ArityError,
    BudgetExceeded,
    DiffBoundError,
    DomainError,
    NonMonotoneSequence,
    ParseError,
    PreconditionFailure,
    QuotientError,
)
from .multiindex import MultiIndex, Order, alpha, enumerate_gamma
from .sequences import geometric, parse_sequence

__all__ = [
    "ArityError",
    "Budget",
    "BudgetExceeded",
    "DiffBoundError",
    "DomainError",
    "MultiIndex",
    "NonMonotoneSequence",
    "Order",
    "ParseError",
    "PreconditionFailure",
    "QuotientError",
    "T_bound",
    "alpha",
    "enumerate_gamma",
    "geometric",
    "parse_sequence",
    "t_bound",
]
