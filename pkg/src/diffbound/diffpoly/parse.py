"""Recursive-descent parser for differential polynomials and system files.

Grammar (whitespace between tokens is ignored)::

    poly     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' nat)?
    atom     := rational | var | '(' poly ')'
    var      := ('x'|'a') nat deriv? | 't' nat
    deriv    := '_[' nat (',' nat)* ']'
    rational := int ('/' nat)?

A system file holds ``dk xj = <poly>`` assignments (the right-hand side of
delta_k x_j) and optional ``poly <name> = <poly>`` lines; ``#`` starts a
comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..errors import DomainError, ParseError
from .ring import BASE, PARAM, STATE, DiffPolynomial, Var

_LETTER_KIND = {"x": STATE, "a": PARAM, "t": BASE}


@dataclass
class _Token:
    kind: str  # num, var, op, end
    value: object
    line: int
    col: int


def _tokenize(text: str, line0: int = 1, col0: int = 1) -> list[_Token]:
    tokens = []
    i, line, col = 0, line0, col0

    def error(msg):
        raise ParseError(msg, line, col)

    while i < len(text):
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        start_line, start_col = line, col
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("num", int(text[i:j]), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append(_Token("op", ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word not in _LETTER_KIND:
                error(f"unknown variable {word!r}")
            k = j
            while k < len(text) and text[k].isdigit():
                k += 1
            if k == j:
                error(f"variable {word!r} needs a numeric index")
            ident = int(text[j:k])
            col += k - i
            i = k
            tag = None
            if text.startswith("_", i):
                match = re.compile(r"_\s*\[([\d\s,]*)\]").match(text, i)
                if not match:
                    error("malformed derivative tag, expected _[n,...]")
                parts = match.group(1).split(",")
                if not all(p.strip().isdigit() for p in parts):
                    error("derivative tag entries must be natural numbers")
                tag = tuple(int(p) for p in parts)
                col += match.end() - i
                i = match.end()
            tokens.append(_Token("var", (word, ident, tag), start_line, start_col))
            continue
        error(f"unexpected character {ch!r}")
    tokens.append(_Token("end", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens, m, max_state, max_param):
        self.tokens = tokens
        self.pos = 0
        self.m = m
        self.max_state = max_state
        self.max_param = max_param

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        tok = self.take()
        if tok.kind != "op" or tok.value != op:
            raise ParseError(f"expected {op!r}", tok.line, tok.col)
        return tok

    def is_op(self, op) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.value == op

    def parse(self) -> DiffPolynomial:
        result = self.poly()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.value!r}", tok.line, tok.col)
        return result

    def poly(self) -> DiffPolynomial:
        sign = 1
        if self.is_op("+") or self.is_op("-"):
            sign = -1 if self.take().value == "-" else 1
        total = self.term().scale(sign)
        while self.is_op("+") or self.is_op("-"):
            sign = -1 if self.take().value == "-" else 1
            total = total + self.term().scale(sign)
        return total

    def term(self) -> DiffPolynomial:
        product = self.factor()
        while self.is_op("*"):
            self.take()
            product = product * self.factor()
        return product

    def factor(self) -> DiffPolynomial:
        value = self.atom()
        if self.is_op("^"):
            self.take()
            tok = self.take()
            if tok.kind != "num":
                raise ParseError("exponent must be a natural number", tok.line, tok.col)
            value = value**tok.value
        return value

    def atom(self) -> DiffPolynomial:
        tok = self.take()
        if tok.kind == "num":
            value = Fraction(tok.value)
            if self.is_op("/"):
                self.take()
                den = self.take()
                if den.kind != "num" or den.value == 0:
                    raise ParseError("denominator must be a positive integer", den.line, den.col)
                value /= den.value
            return DiffPolynomial.const(value, self.m)
        if tok.kind == "var":
            return DiffPolynomial.from_var(self.variable(tok), self.m)
        if tok.kind == "op" and tok.value == "(":
            inner = self.poly()
            self.expect_op(")")
            return inner
        what = "end of input" if tok.kind == "end" else repr(tok.value)
        raise ParseError(f"unexpected {what}", tok.line, tok.col)

    def variable(self, tok: _Token) -> Var:
        letter, ident, tag = tok.value
        kind = _LETTER_KIND[letter]
        name = f"{letter}{ident}"
        if kind == BASE:
            if tag is not None:
                raise ParseError(f"derivative applied to base variable {name}", tok.line, tok.col)
            if not 1 <= ident <= self.m:
                raise ParseError(f"unknown variable {name} (base variables are t1..t{self.m})", tok.line, tok.col)
            return Var(BASE, ident, (0,) * self.m)
        limit = self.max_state if kind == STATE else self.max_param
        if ident < 1 or (limit is not None and ident > limit):
            raise ParseError(f"unknown variable {name}", tok.line, tok.col)
        if tag is None:
            tag = (0,) * self.m
        elif len(tag) != self.m:
            raise ParseError(
                f"derivative tag on {name} has {len(tag)} entries, expected m = {self.m}", tok.line, tok.col
            )
        return Var(kind, ident, tag)


def _infer_m(tokens) -> int:
    tags = {len(t.value[2]) for t in tokens if t.kind == "var" and t.value[2] is not None}
    if tags:
        return max(tags)
    bases = [t.value[1] for t in tokens if t.kind == "var" and t.value[0] == "t"]
    return max(bases, default=1)


def parse_poly(
    text: str,
    m: int | None = None,
    n: int | None = None,
    params: int | None = None,
    *,
    line: int = 1,
    column: int = 1,
) -> DiffPolynomial:
    """Parse ``text`` into a polynomial over m derivations.

    ``m`` is inferred from derivative tags (or t indices) when omitted; ``n``
    and ``params`` cap the admissible state and parameter indices.
    """
    tokens = _tokenize(text, line, column)
    if m is None:
        m = _infer_m(tokens)
    return _Parser(tokens, m, n, params).parse()


@dataclass
class DiffSystem:
    """First-order system delta_k x_j = g[k, j] with order-0 right-hand sides."""

    m: int
    n: int
    assignments: dict
    polys: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [(k, j) for k in range(1, self.m + 1) for j in range(1, self.n + 1) if (k, j) not in self.assignments]
        if missing:
            shown = ", ".join(f"d{k} x{j}" for k, j in missing)
            raise DomainError(f"system assignments are not total; missing {shown}")
        for (k, j), g in self.assignments.items():
            if not (1 <= k <= self.m and 1 <= j <= self.n):
                raise DomainError(f"assignment d{k} x{j} outside m = {self.m}, n = {self.n}")
            if g.m != self.m:
                raise DomainError(f"assignment d{k} x{j} lives over m = {g.m}")
            if g.state_order() > 0:
                raise DomainError(f"right-hand side of d{k} x{j} has positive order in state variables")

    def g(self, k: int, j: int) -> DiffPolynomial:
        return self.assignments[(k, j)]

    @classmethod
    def from_mapping(cls, m: int, n: int, mapping: dict) -> "DiffSystem":
        return cls(m, n, dict(mapping))


_ASSIGN = re.compile(r"^(\s*)d(\d+)\s+x(\d+)\s*=(.*)$")
_NAMED = re.compile(r"^(\s*)poly\s+([A-Za-z_]\w*)\s*=(.*)$")


def parse_system(text: str, m: int | None = None) -> DiffSystem:
    entries = []
    max_k, max_j = 0, 0
    tag_m = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        match = _ASSIGN.match(body)
        if match:
            k, j = int(match.group(2)), int(match.group(3))
            if k < 1 or j < 1:
                raise ParseError("derivation and variable indices start at 1", lineno, 1)
            rhs = match.group(4)
            col = match.start(4) + 1
            entries.append((lineno, col, ("assign", k, j), rhs))
            max_k, max_j = max(max_k, k), max(max_j, j)
        else:
            match = _NAMED.match(body)
            if not match:
                raise ParseError("expected 'dk xj = <poly>' or 'poly <name> = <poly>'", lineno, 1)
            rhs = match.group(3)
            col = match.start(3) + 1
            entries.append((lineno, col, ("poly", match.group(2)), rhs))
        tokens = _tokenize(rhs, lineno, col)
        for tok in tokens:
            if tok.kind == "var":
                letter, ident, tag = tok.value
                if tag is not None:
                    tag_m = max(tag_m, len(tag))
                if letter == "t":
                    tag_m = max(tag_m, ident)
                if letter == "x":
                    max_j = max(max_j, ident)
    if m is None:
        m = max(max_k, tag_m, 1)
    if max_k > m:
        raise DomainError(f"system uses d{max_k} but m = {m}")
    assignments, polys = {}, {}
    for lineno, col, what, rhs in entries:
        value = parse_poly(rhs, m, max_j, line=lineno, column=col)
        if what[0] == "assign":
            if (what[1], what[2]) in assignments:
                raise ParseError(f"duplicate assignment for d{what[1]} x{what[2]}", lineno, 1)
            assignments[(what[1], what[2])] = value
        else:
            polys[what[1]] = value
    return DiffSystem(m, max_j, assignments, polys)


def load_system(path, m: int | None = None) -> DiffSystem:
    return parse_system(Path(path).read_text(encoding="utf-8"), m)


def parse_polys(text: str, m: int | None = None) -> list[DiffPolynomial]:
    """Generator list: one polynomial per non-blank line, or ``poly name = ...`` lines."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        match = _NAMED.match(body)
        if match:
            lines.append((lineno, match.start(3) + 1, match.group(3)))
        else:
            lines.append((lineno, 1, body))
    if m is None:
        m = max((_infer_m(_tokenize(t, ln, c)) for ln, c, t in lines), default=1)
    return [parse_poly(t, m, line=ln, column=c) for ln, c, t in lines]


def parse_point(assignments, m: int) -> dict[int, DiffPolynomial]:
    """Parse ``["x1=t1^2", "x2=t1"]`` into {1: t1^2, 2: t1}."""
    point = {}
    for item in assignments:
        name, eq, value = item.partition("=")
        match = re.fullmatch(r"\s*x(\d+)\s*", name)
        if not eq or not match:
            raise DomainError(f"point coordinate must look like xj=<poly in t>, got {item!r}")
        poly = parse_poly(value, m, n=0, params=0)
        point[int(match.group(1))] = poly
    return point
