"""Sparse differential polynomials with exact rational coefficients.

Indeterminates come in four kinds.  State variables x_j and parameters a_j
carry a derivative tag xi, so ``Var(STATE, 1, (1, 0))`` is delta_1 x_1.  Base
variables t_1..t_m are the coordinates of the concrete differential field
(Q[t], d/dt_k).  Jet variables are prolongation coordinates x_j^xi: they print
like tagged state variables but are ordinary, underived indeterminates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from ..errors import ArityError, DomainError
from ..multiindex import canonical_key

PARAM, BASE, STATE, JET = 0, 1, 2, 3
KIND_LETTER = {PARAM: "a", BASE: "t", STATE: "x", JET: "x"}


class Var(NamedTuple):
    kind: int
    id: int
    xi: tuple

    def key(self) -> tuple:
        return (self.kind, self.id) + canonical_key(self.xi)

    @property
    def order(self) -> int:
        return sum(self.xi)

    def shift(self, k: int) -> "Var":
        xi = list(self.xi)
        xi[k - 1] += 1
        return Var(self.kind, self.id, tuple(xi))

    def name(self) -> str:
        letter = KIND_LETTER[self.kind]
        if self.kind == BASE or not any(self.xi):
            return f"{letter}{self.id}"
        return f"{letter}{self.id}_[{','.join(map(str, self.xi))}]"


def _mono_key(mono: tuple) -> tuple:
    degree = sum(e for _, e in mono)
    return (degree, tuple((v.key(), e) for v, e in reversed(mono)))


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for v, e in b:
        powers[v] = powers.get(v, 0) + e
    return tuple(sorted(powers.items(), key=lambda item: item[0].key()))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient {c!r}")


class DiffPolynomial:
    """Immutable polynomial over Q in the indeterminates of an m-derivation ring."""

    __slots__ = ("m", "_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None, m: int = 1):
        if m < 1:
            raise DomainError(f"number of derivations must be >= 1, got {m}")
        self.m = m
        self._terms = {k: v for k, v in (terms or {}).items() if v != 0}
        self._hash = None

    # construction

    @classmethod
    def const(cls, c, m: int = 1) -> "DiffPolynomial":
        c = _as_fraction(c)
        return cls({(): c} if c else {}, m)

    @classmethod
    def from_var(cls, v: Var, m: int) -> "DiffPolynomial":
        if len(v.xi) != m:
            raise ArityError(f"tag {v.xi} has arity {len(v.xi)}, ring has m = {m}")
        if v.kind == BASE and not 1 <= v.id <= m:
            raise DomainError(f"base variable t{v.id} outside t1..t{m}")
        if v.kind != BASE and v.id < 1:
            raise DomainError(f"variable ids start at 1, got {v.id}")
        return cls({((v, 1),): Fraction(1)}, m)

    @classmethod
    def _coerce(cls, other, m: int) -> "DiffPolynomial":
        if isinstance(other, DiffPolynomial):
            if other.m != m:
                raise ArityError(f"polynomials over m = {m} and m = {other.m}")
            return other
        return cls.const(other, m)

    # inspection

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for mono in self._terms for v, _ in mono}

    def degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self._terms), default=0)

    def state_order(self) -> int:
        """Largest |xi| over the state indeterminates, -1 if none occur."""
        return max((v.order for v in self.variables() if v.kind == STATE), default=-1)

    def sorted_terms(self) -> list:
        """Terms in descending term order."""
        return sorted(self._terms.items(), key=lambda item: _mono_key(item[0]), reverse=True)

    def leading(self) -> tuple:
        if not self._terms:
            raise DomainError("the zero polynomial has no leading term")
        return max(self._terms.items(), key=lambda item: _mono_key(item[0]))

    def monic(self) -> "DiffPolynomial":
        if not self._terms:
            return self
        c = self.leading()[1]
        return DiffPolynomial({k: v / c for k, v in self._terms.items()}, self.m)

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other, self.m)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return DiffPolynomial(out, self.m)

    __radd__ = __add__

    def __neg__(self):
        return DiffPolynomial({k: -v for k, v in self._terms.items()}, self.m)

    def __sub__(self, other):
        return self + (-self._coerce(other, self.m))

    def __rsub__(self, other):
        return self._coerce(other, self.m) - self

    def __mul__(self, other):
        other = self._coerce(other, self.m)
        out: dict = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                k = _mono_mul(ka, kb)
                out[k] = out.get(k, 0) + va * vb
        return DiffPolynomial(out, self.m)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise DomainError(f"exponent must be a natural number, got {e!r}")
        result = DiffPolynomial.const(1, self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c) -> "DiffPolynomial":
        c = _as_fraction(c)
        return DiffPolynomial({k: v * c for k, v in self._terms.items()}, self.m)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPolynomial.const(other, self.m)
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        return self.m == other.m and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.m, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return to_str(self)

    def __repr__(self):
        return f"DiffPolynomial({to_str(self)!r}, m={self.m})"


def state(j: int, xi: Iterable[int] | None = None, m: int = 1) -> DiffPolynomial:
    return DiffPolynomial.from_var(Var(STATE, j, tuple(xi) if xi else (0,) * m), m)


def param(j: int, xi: Iterable[int] | None = None, m: int = 1) -> DiffPolynomial:
    return DiffPolynomial.from_var(Var(PARAM, j, tuple(xi) if xi else (0,) * m), m)


def base(j: int, m: int = 1) -> DiffPolynomial:
    return DiffPolynomial.from_var(Var(BASE, j, (0,) * m), m)


def jet(j: int, xi: Iterable[int], m: int) -> DiffPolynomial:
    return DiffPolynomial.from_var(Var(JET, j, tuple(xi)), m)


def const(c, m: int = 1) -> DiffPolynomial:
    return DiffPolynomial.const(c, m)


def _format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_str(f: DiffPolynomial) -> str:
    """Render in the parser's grammar, terms in descending order."""
    if f.is_zero():
        return "0"
    pieces = []
    for mono, c in f.sorted_terms():
        negative = c < 0
        c = -c if negative else c
        factors = [v.name() + (f"^{e}" if e > 1 else "") for v, e in mono]
        if not factors:
            body = _format_coefficient(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coefficient(c)] + factors)
        if not pieces:
            pieces.append(("-" if negative else "") + body)
        else:
            pieces.append((" - " if negative else " + ") + body)
    return "".join(pieces)


def _derive_var(v: Var, k: int, m: int) -> DiffPolynomial | None:
    """delta_k v, or None when it vanishes."""
    if v.kind in (STATE, PARAM):
        return DiffPolynomial({((v.shift(k), 1),): Fraction(1)}, m)
    if v.kind == BASE:
        return DiffPolynomial.const(1, m) if v.id == k else None
    raise DomainError(f"jet coordinate {v.name()} is not a differential indeterminate")


def derive_formal(f: DiffPolynomial, k: int) -> DiffPolynomial:
    """Apply delta_k by the Leibniz rule."""
    if not 1 <= k <= f.m:
        raise DomainError(f"derivation index {k} outside 1..{f.m}")
    out: dict = {}
    for mono, c in f.items():
        for pos, (v, e) in enumerate(mono):
            dv = _derive_var(v, k, f.m)
            if dv is None:
                continue
            rest = mono[:pos] + (((v, e - 1),) if e > 1 else ()) + mono[pos + 1 :]
            for dmono, dc in dv.items():
                key = _mono_mul(rest, dmono)
                out[key] = out.get(key, 0) + c * e * dc
    return DiffPolynomial(out, f.m)


def derive_multi(f: DiffPolynomial, xi: Iterable[int]) -> DiffPolynomial:
    """delta^xi f = delta_m^{xi_m} ... delta_1^{xi_1} f (delta_1 applied first)."""
    xi = tuple(xi)
    if len(xi) != f.m:
        raise ArityError(f"multi-index {xi} has arity {len(xi)}, ring has m = {f.m}")
    for k, times in enumerate(xi, start=1):
        if times < 0:
            raise DomainError(f"multi-index entries must be non-negative, got {xi}")
        for _ in range(times):
            f = derive_formal(f, k)
    return f


def substitute(f: DiffPolynomial, mapping: Mapping[Var, DiffPolynomial]) -> DiffPolynomial:
    """Simultaneous substitution; indeterminates missing from mapping are kept."""
    result: dict = {}
    powers: dict = {}

    def power(v: Var, e: int) -> DiffPolynomial:
        key = (v, e)
        if key not in powers:
            powers[key] = DiffPolynomial._coerce(mapping[v], f.m) ** e
        return powers[key]

    for mono, c in f.items():
        kept = tuple((v, e) for v, e in mono if v not in mapping)
        term = DiffPolynomial({kept: c}, f.m)
        for v, e in mono:
            if v in mapping:
                term = term * power(v, e)
        for k, val in term.items():
            result[k] = result.get(k, 0) + val
    return DiffPolynomial(result, f.m)


def rename(f: DiffPolynomial, fn) -> DiffPolynomial:
    """Apply an injective indeterminate renaming ``fn(Var) -> Var``."""
    out: dict = {}
    for mono, c in f.items():
        powers: dict = {}
        for v, e in mono:
            w = fn(v)
            powers[w] = powers.get(w, 0) + e
        key = tuple(sorted(powers.items(), key=lambda item: item[0].key()))
        out[key] = out.get(key, 0) + c
    return DiffPolynomial(out, f.m)


def evaluate_point(f: DiffPolynomial, point: Mapping[int, DiffPolynomial]) -> DiffPolynomial:
    """Replace each delta^xi x_j (or jet x_j^xi) by d^xi/dt^xi of point[j]."""
    mapping = {}
    for v in f.variables():
        if v.kind == PARAM:
            raise DomainError(f"cannot evaluate parameter {v.name()} at a point")
        if v.kind in (STATE, JET):
            if v.id not in point:
                raise DomainError(f"point assigns no value to x{v.id}")
            value = DiffPolynomial._coerce(point[v.id], f.m)
            if any(w.kind != BASE for w in value.variables()):
                raise DomainError(f"point value for x{v.id} is not a polynomial in t")
            mapping[v] = derive_multi(value, v.xi)
    return substitute(f, mapping)
