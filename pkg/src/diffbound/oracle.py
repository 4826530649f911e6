"""Brute-force verifiers for the antichain bounds and the prolongation identities.

Longest strictly increasing chains S_0 < S_1 < ... < S_k of antichains with
S_j inside {(xi, i) : |xi| <= a_j} are searched in two ways.

``explicit``
    Depth-first search over actual antichains.  Any such chain can be refined
    so that S_0 is empty and every step adds exactly one point (subsets of
    antichains are antichains and the a_j are non-decreasing), and its points
    can be added in ascending canonical order, which sorts by |xi| first.
    Interchangeable coordinates are pruned by only opening the smallest unused
    coordinate index.

``levels`` (m <= 2)
    Every point of an antichain of size s in N^2 has order >= s - 1, so each
    coordinate's antichain can be replaced by s points of the level line
    |xi| = s - 1 without raising any order (in N^1 an antichain is a single
    point, which moves to order 0).  The search then ranges over the class
    sizes only, which makes long chains exhaustively searchable.  Witness
    chains are built from explicit points and re-validated independently.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Sequence

from .budget import Budget, DEFAULT_BUDGET, Meter
from .chainbound import t_bound
from .diffpoly.ring import DiffPolynomial, evaluate_point
from .errors import BudgetExceeded, DomainError, PreconditionFailure
from .multiindex import IndexedPoint, Order, alpha, cmp_product, enumerate_gamma, point
from .prolong import evaluate_on_nabla, prolong_substitution
from .sequences import SequenceSpec

EXPLICIT_AUTO_NODES = 20_000
EXPLICIT_AUTO_UNIVERSE = 2_000


@dataclass
class AntichainSet:
    elements: frozenset
    m: int
    n: int

    def __post_init__(self):
        pts = list(self.elements)
        for p in pts:
            if len(p.xi) != self.m or not 0 <= p.i < self.n:
                raise DomainError(f"point {p} outside N^{self.m} x {self.n}")
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                if cmp_product(pts[a], pts[b]) is not Order.INCOMPARABLE:
                    raise DomainError(f"{pts[a]} and {pts[b]} are comparable")

    def sorted(self) -> list:
        return sorted(self.elements, key=IndexedPoint.key)

    def to_json(self) -> list:
        return [[list(p.xi), p.i] for p in self.sorted()]


@dataclass
class ChainSearchReport:
    m: int
    n: int
    max_strict_steps: int
    witness: list
    nodes_explored: int
    exhaustive: bool
    method: str
    bounds: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "max_strict_steps": self.max_strict_steps,
            "witness": [s.to_json() for s in self.witness],
            "nodes_explored": self.nodes_explored,
            "exhaustive": self.exhaustive,
            "method": self.method,
            "sequence_prefix": self.bounds,
        }


def validate_witness(report: ChainSearchReport, seq: SequenceSpec, budget: Budget | None = None) -> None:
    """Independent re-check of a witness chain; raises AssertionError on failure."""
    meter = Meter(budget)
    chain = report.witness
    assert len(chain) == report.max_strict_steps + 1, "witness length does not match k"
    for j, s in enumerate(chain):
        pts = list(s.elements)
        for a in range(len(pts)):
            assert len(pts[a].xi) == report.m and 0 <= pts[a].i < report.n, "point outside the space"
            for b in range(a + 1, len(pts)):
                assert cmp_product(pts[a], pts[b]) is Order.INCOMPARABLE, f"S_{j} is not an antichain"
        bound = seq.at(j, meter)
        assert all(sum(p.xi) <= bound for p in pts), f"S_{j} violates |xi| <= a_{j} = {bound}"
        if j:
            assert chain[j - 1].elements < s.elements, f"S_{j - 1} is not a proper subset of S_{j}"


def _chain_from_points(points: Sequence[IndexedPoint], m: int, n: int) -> list:
    chain = [AntichainSet(frozenset(), m, n)]
    for j in range(1, len(points) + 1):
        chain.append(AntichainSet(frozenset(points[:j]), m, n))
    return chain


def _explicit(m, n, seq, depth_cap, budget, node_limit, universe_limit=None) -> ChainSearchReport:
    meter = Meter(budget)
    bounds = [seq.at(j, meter) for j in range(depth_cap + 1)]
    universe_cache: dict = {}

    def universe(level: int) -> list:
        if level not in universe_cache:
            if universe_limit is not None and alpha(m, level) * n > universe_limit:
                raise BudgetExceeded("enumeration", universe_limit, detail=f"{alpha(m, level) * n} candidate points")
            xis = enumerate_gamma(m, level, budget.enumeration // max(n, 1))
            pts = [point(xi, i) for xi in xis for i in range(n)]
            pts.sort(key=IndexedPoint.key)
            universe_cache[level] = (pts, [p.key() for p in pts])
        return universe_cache[level]

    memo: dict = {}
    nodes = 0
    hit_cap = False
    deepest: tuple = ()

    def search(state: tuple, used: int) -> tuple:
        nonlocal nodes, hit_cap, deepest
        key = frozenset(state)
        if key in memo:
            return memo[key]
        nodes += 1
        if nodes > node_limit:
            raise BudgetExceeded("steps", node_limit, len(state), "explicit chain search")
        if len(state) > len(deepest):
            deepest = state
        j = len(state)
        best = (j, ())
        if j == depth_cap:
            hit_cap = True
        else:
            pts, keys = universe(bounds[j + 1])
            start = bisect.bisect_right(keys, state[-1].key()) if state else 0
            for p in pts[start:]:
                if p.i > used:
                    continue
                if any(cmp_product(p, q) is not Order.INCOMPARABLE for q in state):
                    continue
                length, tail = search(state + (p,), max(used, p.i + 1))
                if length > best[0]:
                    best = (length, (p,) + tail)
        memo[key] = best
        return best

    try:
        length, pts = search((), 0)
        exhaustive = not hit_cap
    except BudgetExceeded:
        # truncated: report the deepest chain seen as a lower bound
        length, pts = len(deepest), deepest
        exhaustive = False
    return ChainSearchReport(m, n, length, _chain_from_points(list(pts), m, n), nodes, exhaustive, "explicit", bounds)


def _levels(m, n, seq, depth_cap, budget) -> ChainSearchReport:
    if m > 2:
        raise DomainError("the level-compression search applies to m <= 2 only")
    meter = Meter(budget)
    memo: dict = {}

    def sizes_allowed(pos: int) -> range:
        cap_level = seq.at(pos + 1, meter)
        if m == 1:
            return range(1, 2)
        # a class of size s sits on the level line s - 1 <= a_{pos+1}
        return range(1, cap_level + 2)

    def best(pos: int, remaining: int) -> tuple:
        key = (pos, remaining)
        if key in memo:
            return memo[key]
        meter.tick()
        result = (pos, ())
        if remaining > 0:
            allowed = sizes_allowed(pos)
            choices = [allowed[-1]] if remaining == 1 else reversed(allowed)
            for s in choices:
                length, tail = best(pos + s, remaining - 1)
                if length > result[0]:
                    result = (length, (s,) + tail)
        memo[key] = result
        return result

    length, sizes = best(0, n)
    points = []
    for i, s in enumerate(sizes):
        level = s - 1
        if m == 1:
            points.append(point((0,), i))
        else:
            pts = [point((x, level - x), i) for x in range(s)]
            points.extend(sorted(pts, key=IndexedPoint.key))
    exhaustive = True
    if depth_cap is not None and length > depth_cap:
        length, points, exhaustive = depth_cap, points[:depth_cap], False
    bounds = [seq.at(j, meter) for j in range(min(length, 64) + 1)]
    return ChainSearchReport(m, n, length, _chain_from_points(points, m, n), meter.steps, exhaustive, "levels", bounds)


def max_strict_chain(
    m: int,
    n: int,
    seq: SequenceSpec,
    depth_cap: int | None = None,
    budget: Budget | None = None,
    method: str = "auto",
) -> ChainSearchReport:
    """Longest strictly increasing chain of constrained antichains.

    ``method`` is ``explicit``, ``levels`` or ``auto`` (explicit search under a
    node budget, then the level search when that is not exhaustive).
    """
    if m < 1 or n < 1:
        raise DomainError(f"need m, n >= 1, got m={m}, n={n}")
    if method not in ("auto", "explicit", "levels"):
        raise DomainError(f"unknown search method {method!r}")
    budget = budget or DEFAULT_BUDGET
    if method == "levels":
        return _levels(m, n, seq, depth_cap, budget)
    cap = 64 if depth_cap is None else depth_cap
    if method == "explicit":
        return _explicit(m, n, seq, cap, budget, budget.steps)
    try:
        report = _explicit(m, n, seq, cap, budget, min(budget.steps, EXPLICIT_AUTO_NODES), EXPLICIT_AUTO_UNIVERSE)
    except BudgetExceeded:
        report = None
    if report is not None and report.exhaustive:
        return report
    if m <= 2:
        return _levels(m, n, seq, depth_cap, budget)
    if report is None:
        raise BudgetExceeded("enumeration", budget.enumeration, detail="explicit chain search universe")
    return report


@dataclass
class SoundnessReport:
    passed: bool
    max_strict_steps: int
    t: int
    exhaustive: bool
    method: str

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_strict_steps": self.max_strict_steps,
            "t": self.t,
            "exhaustive": self.exhaustive,
            "method": self.method,
        }


def verify_t_soundness(
    m: int,
    n: int,
    seq: SequenceSpec,
    depth_cap: int | None = None,
    budget: Budget | None = None,
    method: str = "auto",
) -> SoundnessReport:
    """Pass iff an exhaustive search finds at most t(m, n, seq) - 1 strict steps."""
    t = t_bound(m, n, seq, budget)
    if depth_cap is None:
        # reaching t steps already refutes the bound, so searching deeper is moot
        depth_cap = t if t < 10**6 else None
    report = max_strict_chain(m, n, seq, depth_cap, budget, method)
    passed = report.exhaustive and report.max_strict_steps <= t - 1
    return SoundnessReport(passed, report.max_strict_steps, t, report.exhaustive, report.method)


@dataclass
class Case1Report:
    sigma: tuple
    box: int
    max_size: int
    witness: list
    antichains: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.max_size <= self.bound

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "box": self.box,
            "max_size": self.max_size,
            "bound": self.bound,
            "ok": self.ok,
            "witness": [list(p) for p in self.witness],
            "antichains_enumerated": self.antichains,
        }


def check_case1(sigma: Sequence[int], box: int, budget: Budget | None = None) -> Case1Report:
    """Enumerate every antichain of [0, box]^2 containing sigma."""
    sigma = tuple(sigma)
    if len(sigma) != 2:
        raise DomainError("sigma must lie in N^2")
    if box < 0 or any(s < 0 or s > box for s in sigma):
        raise DomainError(f"sigma {sigma} must lie in [0, {box}]^2")
    budget = budget or DEFAULT_BUDGET
    meter = Meter(budget)

    def incomparable(p, q):
        return (p[0] < q[0] and p[1] > q[1]) or (p[0] > q[0] and p[1] < q[1])

    cands = [(x, y) for x in range(box + 1) for y in range(box + 1) if incomparable((x, y), sigma)]
    best = [sigma]
    count = 0

    def extend(chosen: list, start: int):
        nonlocal best, count
        count += 1
        meter.tick()
        if len(chosen) > len(best):
            best = list(chosen)
        for idx in range(start, len(cands)):
            p = cands[idx]
            if all(incomparable(p, q) for q in chosen):
                chosen.append(p)
                extend(chosen, idx + 1)
                chosen.pop()

    extend([sigma], 0)
    return Case1Report(sigma, box, len(best), sorted(best), count, sum(sigma) + 1)


@dataclass
class ProlongPointsReport:
    ok: bool
    checked: int
    violations: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "violations": self.violations}


def verify_prolong_on_points(generators: Sequence[DiffPolynomial], points: Sequence[dict], ell: int) -> ProlongPointsReport:
    """Every prolongation equation must vanish at nabla_ell of every point on V."""
    for pidx, pt in enumerate(points):
        for gidx, f in enumerate(generators):
            value = evaluate_point(f, pt)
            if not value.is_zero():
                raise PreconditionFailure(f"point {pidx} is not on the variety: generator {gidx} gives {value}")
    out = prolong_substitution(generators, ell)
    violations, checked = [], 0
    for pidx, pt in enumerate(points):
        full = dict(pt)
        for j in range(1, out.n + 1):
            full.setdefault(j, DiffPolynomial.const(0, out.m))
        for eq in out.equations:
            checked += 1
            value = evaluate_on_nabla(eq.poly, full, ell)
            if not value.is_zero():
                violations.append(
                    {"generator": eq.generator, "xi": list(eq.xi), "point": pidx, "value": str(value)}
                )
    return ProlongPointsReport(not violations, checked, violations)
