"""Multi-indices, the two orders on N^m x n, and Gamma(ell) combinatorics.

A multi-index xi = (xi_1, ..., xi_m) tags the derivative delta^xi; its order
is |xi| = xi_1 + ... + xi_m.  Points (xi, i) of N^m x n carry a coordinate
index i as well, and are compared either by the product order (same i and
xi <= zeta entrywise) or by the canonical total order, which sorts
lexicographically on (|xi|, i, xi_m, ..., xi_1).
"""

from __future__ import annotations

import enum
import math
from typing import Iterator, NamedTuple, Sequence

from .errors import ArityError, BudgetExceeded, DomainError

DEFAULT_ENUMERATION_LIMIT = 10**7


class Order(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class MultiIndex(tuple):
    """Immutable exponent vector in N^m."""

    def __new__(cls, entries: Sequence[int] = ()):
        entries = tuple(entries)
        for e in entries:
            if not isinstance(e, int) or isinstance(e, bool):
                raise DomainError(f"multi-index entries must be integers, got {e!r}")
            if e < 0:
                raise DomainError(f"multi-index entries must be non-negative, got {e}")
        return super().__new__(cls, entries)

    @classmethod
    def zero(cls, m: int) -> "MultiIndex":
        return cls((0,) * m)

    @classmethod
    def unit(cls, m: int, k: int) -> "MultiIndex":
        """The vector **k** with a single 1 in position k (1-based)."""
        if not 1 <= k <= m:
            raise DomainError(f"unit index {k} outside 1..{m}")
        return cls(tuple(1 if j == k - 1 else 0 for j in range(m)))

    @property
    def m(self) -> int:
        return len(self)

    @property
    def order(self) -> int:
        return sum(self)

    def __add__(self, other):
        if len(self) != len(other):
            raise ArityError(f"cannot add multi-indices of arity {len(self)} and {len(other)}")
        return MultiIndex(a + b for a, b in zip(self, other))

    def shift(self, k: int) -> "MultiIndex":
        """xi + **k**."""
        out = list(self)
        out[k - 1] += 1
        return MultiIndex(out)

    def lower(self, k: int) -> "MultiIndex":
        """xi - **k**; requires xi_k > 0."""
        if self[k - 1] == 0:
            raise DomainError(f"cannot lower {tuple(self)} along {k}")
        out = list(self)
        out[k - 1] -= 1
        return MultiIndex(out)

    def __repr__(self):
        return f"MultiIndex({tuple(self)!r})"


def canonical_key(xi: Sequence[int]) -> tuple:
    """Sort key of xi within one coordinate: (|xi|, xi_m, ..., xi_1)."""
    return (sum(xi),) + tuple(reversed(tuple(xi)))


class IndexedPoint(NamedTuple):
    """Element (xi, i) of N^m x n, identified with delta^xi x_{i+1}."""

    xi: MultiIndex
    i: int

    @property
    def order(self) -> int:
        return sum(self.xi)

    def key(self) -> tuple:
        """Canonical total-order key (|xi|, i, xi_m, ..., xi_1)."""
        return (sum(self.xi), self.i) + tuple(reversed(tuple(self.xi)))


def point(xi: Sequence[int], i: int = 0) -> IndexedPoint:
    if i < 0:
        raise DomainError(f"coordinate index must be non-negative, got {i}")
    return IndexedPoint(MultiIndex(xi), i)


def alpha(m: int, ell: int) -> int:
    """Number of multi-indices of order at most ell: binom(ell + m, m)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if ell < 0:
        raise DomainError(f"ell must be >= 0, got {ell}")
    return math.comb(ell + m, m)


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    """Tuples of `parts` naturals summing to `total`, ascending in reversed lex."""
    if parts == 1:
        yield (total,)
        return
    # the last entry is most significant in the reversed lexicographic order
    for last in range(total + 1):
        for head in _compositions(total - last, parts - 1):
            yield head + (last,)


def enumerate_gamma(m: int, ell: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> list[MultiIndex]:
    """All xi with |xi| <= ell in canonical order."""
    size = alpha(m, ell)
    if size > limit:
        raise BudgetExceeded("enumeration", limit, detail=f"|Gamma({ell})| = {size} for m = {m}")
    return [MultiIndex(c) for d in range(ell + 1) for c in _compositions(d, m)]


def enumerate_level(m: int, d: int) -> list[MultiIndex]:
    """All xi with |xi| == d in canonical order."""
    return [MultiIndex(c) for c in _compositions(d, m)]


def _check_arity(p: IndexedPoint, q: IndexedPoint) -> None:
    if len(p.xi) != len(q.xi):
        raise ArityError(f"points of arity {len(p.xi)} and {len(q.xi)}")


def cmp_product(p: IndexedPoint, q: IndexedPoint) -> Order:
    _check_arity(p, q)
    if p.i != q.i:
        return Order.INCOMPARABLE
    le = all(a <= b for a, b in zip(p.xi, q.xi))
    ge = all(a >= b for a, b in zip(p.xi, q.xi))
    if le and ge:
        return Order.EQUAL
    if le:
        return Order.LESS
    if ge:
        return Order.GREATER
    return Order.INCOMPARABLE


def cmp_canonical(p: IndexedPoint, q: IndexedPoint) -> Order:
    _check_arity(p, q)
    kp, kq = p.key(), q.key()
    if kp < kq:
        return Order.LESS
    if kp > kq:
        return Order.GREATER
    return Order.EQUAL


def comparable(p: IndexedPoint, q: IndexedPoint) -> bool:
    return cmp_product(p, q) is not Order.INCOMPARABLE
