"""Prolongation equations, the nabla map on concrete points, and integrability.

Two independent routes produce the prolongation equations f^xi of a variety
V = V(f_1, ..., f_r):

* substitution: differentiate f along xi, then rename delta^zeta x_j to the jet
  coordinate x_j^zeta;
* truncated exponential: evaluate f at x_j = sum_xi (1/xi!) x_j^xi eps^xi, with
  coefficients t_k sent to t_k + eps_k, inside Q[t, x^.][eps]/(eps)^{ell+1},
  and read off xi! times the eps^xi coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .budget import Budget, DEFAULT_BUDGET
from .diffpoly.parse import DiffSystem
from .diffpoly.ring import (
    BASE,
    JET,
    PARAM,
    STATE,
    DiffPolynomial,
    Var,
    derive_formal,
    derive_multi,
    rename,
    substitute,
)
from .errors import BudgetExceeded, DomainError
from .multiindex import enumerate_gamma


@dataclass(frozen=True)
class Equation:
    generator: int
    xi: tuple
    poly: DiffPolynomial


@dataclass
class ProlongationOutput:
    ell: int
    m: int
    n: int
    coords: list
    equations: list = field(default_factory=list)

    def polys(self) -> list[DiffPolynomial]:
        return [eq.poly for eq in self.equations]

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "coords": [v.name() for v in self.coords],
            "equations": [
                {"generator": eq.generator, "xi": list(eq.xi), "poly": str(eq.poly)} for eq in self.equations
            ],
        }


def prolonged_variable(j: int, xi: Sequence[int]) -> Var:
    return Var(JET, j, tuple(xi))


def _check_generators(generators: Sequence[DiffPolynomial]) -> tuple[int, int]:
    if not generators:
        raise DomainError("prolongation needs at least one generator")
    m = generators[0].m
    n = 0
    for idx, f in enumerate(generators):
        if f.m != m:
            raise DomainError(f"generator {idx} lives over m = {f.m}, expected {m}")
        for v in f.variables():
            if v.kind == PARAM:
                raise DomainError(f"generator {idx} contains parameter {v.name()}")
            if v.kind == JET:
                raise DomainError(f"generator {idx} already contains jet coordinate {v.name()}")
            if v.kind == STATE:
                if v.order > 0:
                    raise DomainError(f"generator {idx} has positive order ({v.name()})")
                n = max(n, v.id)
    return m, n


def _coords(m: int, n: int, ell: int) -> list[Var]:
    return [prolonged_variable(j, xi) for xi in enumerate_gamma(m, ell) for j in range(1, n + 1)]


def _to_jet(v: Var) -> Var:
    return Var(JET, v.id, v.xi) if v.kind == STATE else v


def prolong_substitution(generators: Sequence[DiffPolynomial], ell: int, n: int | None = None) -> ProlongationOutput:
    if ell < 0:
        raise DomainError(f"prolongation order must be >= 0, got {ell}")
    m, n_seen = _check_generators(generators)
    n = n_seen if n is None else max(n, n_seen)
    gamma = enumerate_gamma(m, ell)
    out = ProlongationOutput(ell, m, n, _coords(m, n, ell))
    for idx, f in enumerate(generators):
        for xi in gamma:
            out.equations.append(Equation(idx, tuple(xi), rename(derive_multi(f, xi), _to_jet)))
    return out


class TruncatedSeries:
    """Element of R[eps_1..eps_m]/(eps)^{ell+1} with R a polynomial ring."""

    __slots__ = ("m", "ell", "coeffs")

    def __init__(self, m: int, ell: int, coeffs: dict | None = None):
        self.m = m
        self.ell = ell
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if not v.is_zero()}

    @classmethod
    def constant(cls, c: DiffPolynomial, ell: int) -> "TruncatedSeries":
        return cls(c.m, ell, {(0,) * c.m: c})

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return TruncatedSeries(self.m, self.ell, out)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out: dict = {}
        for ka, va in self.coeffs.items():
            da = sum(ka)
            for kb, vb in other.coeffs.items():
                if da + sum(kb) > self.ell:
                    continue
                k = tuple(x + y for x, y in zip(ka, kb))
                prod = va * vb
                out[k] = out[k] + prod if k in out else prod
        return TruncatedSeries(self.m, self.ell, out)

    def size(self) -> int:
        return sum(len(v) for v in self.coeffs.values())

    def coefficient(self, xi: tuple) -> DiffPolynomial:
        return self.coeffs.get(tuple(xi), DiffPolynomial.const(0, self.m))


def _factorial(xi: Sequence[int]) -> int:
    return math.prod(math.factorial(e) for e in xi)


def prolong_epsilon(
    generators: Sequence[DiffPolynomial], ell: int, n: int | None = None, budget: Budget | None = None
) -> ProlongationOutput:
    if ell < 0:
        raise DomainError(f"prolongation order must be >= 0, got {ell}")
    budget = budget or DEFAULT_BUDGET
    m, n_seen = _check_generators(generators)
    n = n_seen if n is None else max(n, n_seen)
    gamma = [tuple(xi) for xi in enumerate_gamma(m, ell)]
    zero = (0,) * m

    def guard(s: TruncatedSeries) -> TruncatedSeries:
        if s.size() > budget.terms:
            raise BudgetExceeded("terms", budget.terms, detail="truncated exponential expansion")
        return s

    images: dict[Var, TruncatedSeries] = {}

    def image(v: Var) -> TruncatedSeries:
        if v not in images:
            if v.kind == STATE:
                coeffs = {
                    xi: DiffPolynomial({((prolonged_variable(v.id, xi), 1),): Fraction(1, _factorial(xi))}, m)
                    for xi in gamma
                }
            elif v.kind == BASE:
                # exponential of the coordinate t_k is t_k + eps_k
                coeffs = {zero: DiffPolynomial({((v, 1),): Fraction(1)}, m)}
                if ell >= 1:
                    unit = tuple(1 if i == v.id - 1 else 0 for i in range(m))
                    coeffs[unit] = DiffPolynomial.const(1, m)
            else:
                raise DomainError(f"unexpected indeterminate {v.name()}")
            images[v] = TruncatedSeries(m, ell, coeffs)
        return images[v]

    out = ProlongationOutput(ell, m, n, _coords(m, n, ell))
    for idx, f in enumerate(generators):
        powers: dict = {}
        total = TruncatedSeries(m, ell)
        for mono, c in f.items():
            term = TruncatedSeries.constant(DiffPolynomial.const(c, m), ell)
            for v, e in mono:
                key = (v, e)
                if key not in powers:
                    p = image(v)
                    acc = p
                    for _ in range(e - 1):
                        acc = guard(acc * p)
                    powers[key] = acc
                term = guard(term * powers[key])
            total = guard(total + term)
        for xi in gamma:
            out.equations.append(Equation(idx, xi, total.coefficient(xi).scale(_factorial(xi))))
    return out


def nabla_point(point: Mapping[int, DiffPolynomial], ell: int, m: int | None = None) -> tuple:
    """(d^xi p_j) for xi in Gamma(ell) (outer) and j ascending (inner)."""
    if not point:
        raise DomainError("point must assign at least one coordinate")
    ids = sorted(point)
    if ids != list(range(1, len(ids) + 1)):
        raise DomainError(f"point must assign x1..xn, got ids {ids}")
    m = m or next(iter(point.values())).m
    for j in ids:
        if any(v.kind != BASE for v in point[j].variables()):
            raise DomainError(f"point value for x{j} is not a polynomial in t")
    return tuple(derive_multi(point[j], xi) for xi in enumerate_gamma(m, ell) for j in ids)


def evaluate_on_nabla(f: DiffPolynomial, point: Mapping[int, DiffPolynomial], ell: int) -> DiffPolynomial:
    """Evaluate a polynomial in jet coordinates at nabla_ell(point)."""
    values = nabla_point(point, ell, f.m)
    coords = _coords(f.m, len(point), ell)
    mapping = dict(zip(coords, values))
    for v in f.variables():
        if v.kind == JET and v not in mapping:
            raise DomainError(f"jet coordinate {v.name()} outside order {ell}")
        if v.kind in (STATE, PARAM):
            raise DomainError(f"{v.name()} is not a jet coordinate")
    return substitute(f, mapping)


def _first_order_map(system: DiffSystem) -> dict:
    m = system.m
    out = {}
    for (k, j), g in system.assignments.items():
        xi = tuple(1 if i == k - 1 else 0 for i in range(m))
        out[Var(STATE, j, xi)] = g
    return out


def total_derivative(h: DiffPolynomial, k: int, system: DiffSystem) -> DiffPolynomial:
    """D_k h for h of order 0: differentiate, then replace delta_i x_s by g_is."""
    if h.state_order() > 0:
        raise DomainError("total derivative expects an order-0 polynomial")
    return substitute(derive_formal(h, k), _first_order_map(system))


def integrability_pair(system: DiffSystem, k: int, l: int, j: int) -> DiffPolynomial:
    """D_l(g_kj) - D_k(g_lj), before normalization (any k, l)."""
    return total_derivative(system.g(k, j), l, system) - total_derivative(system.g(l, j), k, system)


def integrability_conditions(system: DiffSystem) -> list[DiffPolynomial]:
    out = []
    for k in range(1, system.m + 1):
        for l in range(k + 1, system.m + 1):
            for j in range(1, system.n + 1):
                c = integrability_pair(system, k, l, j)
                if not c.is_zero():
                    out.append(c.monic())
    return out


def reduce_modulo_system(f: DiffPolynomial, system: DiffSystem, strategy: str = "smallest") -> DiffPolynomial:
    """Rewrite every positive-order state indeterminate through the system.

    delta^xi x_j with xi = zeta + k is replaced by D^zeta(g_kj), with k the
    smallest (or, for ``strategy="largest"``, the largest) index where xi_k > 0
    and D^zeta applied one derivation at a time in ascending order.
    """
    if strategy not in ("smallest", "largest"):
        raise DomainError(f"unknown reduction strategy {strategy!r}")
    if f.m != system.m:
        raise DomainError(f"polynomial over m = {f.m}, system over m = {system.m}")
    mapping = {}
    for v in f.variables():
        if v.kind != STATE or v.order == 0:
            continue
        if v.id > system.n:
            raise DomainError(f"system has no assignments for x{v.id}")
        positive = [i + 1 for i, e in enumerate(v.xi) if e > 0]
        k = positive[0] if strategy == "smallest" else positive[-1]
        zeta = list(v.xi)
        zeta[k - 1] -= 1
        h = system.g(k, v.id)
        for i, times in enumerate(zeta, start=1):
            for _ in range(times):
                h = total_derivative(h, i, system)
        mapping[v] = h
    return substitute(f, mapping)
