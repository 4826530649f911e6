"""Symbolic degree and cardinality bounds.

Bounds are returned as :class:`BoundExpr` trees (integers, binomials, sums,
products, powers and exact quotients).  :func:`eval_bound` evaluates a tree
exactly when the result fits the evaluation budget and otherwise returns a
:class:`Magnitude`, an iterated-logarithm estimate: ``Magnitude(h, v)`` means
log2 applied h times to the bound is about v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

from .budget import Budget, DEFAULT_BUDGET
from .chainbound import T_bound
from .errors import DomainError, QuotientError
from .multiindex import alpha

FOLD_BITS = 4096
_FLOAT_CAP = 1000.0


class BoundExpr:
    """Base class of expression nodes; nodes are immutable and compare structurally."""

    def __add__(self, other):
        return Add((self, _wrap(other)))

    def __radd__(self, other):
        return Add((_wrap(other), self))

    def __mul__(self, other):
        return Mul((self, _wrap(other)))

    def __rmul__(self, other):
        return Mul((_wrap(other), self))

    def __pow__(self, other):
        return Pow(self, _wrap(other))

    def __str__(self):
        return to_str(self)


@dataclass(frozen=True, eq=True)
class Int(BoundExpr):
    value: int
    meta: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, eq=True)
class Binom(BoundExpr):
    n: BoundExpr
    k: BoundExpr
    meta: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, eq=True)
class Add(BoundExpr):
    args: tuple
    meta: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, eq=True)
class Mul(BoundExpr):
    args: tuple
    meta: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, eq=True)
class Pow(BoundExpr):
    base: BoundExpr
    exp: BoundExpr
    meta: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, eq=True)
class Quot(BoundExpr):
    """Exact quotient num / den; evaluation fails unless den divides num."""

    num: BoundExpr
    den: BoundExpr
    meta: dict = field(default_factory=dict, compare=False, repr=False, kw_only=True)


def _wrap(x) -> BoundExpr:
    if isinstance(x, BoundExpr):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Int(x)
    raise TypeError(f"cannot use {x!r} in a bound expression")


def lit(v: int) -> Int:
    return Int(v)


def binom(n, k) -> Binom:
    return Binom(_wrap(n), _wrap(k))


def add(*args) -> Add:
    return Add(tuple(_wrap(a) for a in args))


def mul(*args) -> Mul:
    return Mul(tuple(_wrap(a) for a in args))


def power(b, e) -> Pow:
    return Pow(_wrap(b), _wrap(e))


def quot(a, b) -> Quot:
    return Quot(_wrap(a), _wrap(b))


def alpha_expr(m: int, ell: int) -> Binom:
    """alpha_ell = binom(ell + m, m), kept symbolic."""
    return binom(ell + m, m)


@dataclass(frozen=True)
class Magnitude:
    height: int
    value: float

    def to_json(self) -> dict:
        return {"log_height": self.height, "log_value": self.value}

    def __str__(self):
        return f"Magnitude(h={self.height}, v={self.value!r})"


# magnitude arithmetic


def _ilog2(x: int) -> float:
    bits = x.bit_length()
    if bits <= 1000:
        return math.log2(x)
    shift = bits - 64
    return math.log2(x >> shift) + shift


def _norm(h: int, v: float) -> tuple[int, float]:
    while h > 0 and v < _FLOAT_CAP:
        v = 2.0**v
        h -= 1
    return h, v


@dataclass(frozen=True)
class _Est:
    """Estimate (h, v) of a value, with the exact integer when it is known."""

    h: int
    v: float
    exact: int | None = None

    @classmethod
    def of_int(cls, x: int) -> "_Est":
        if abs(x).bit_length() <= 1000:
            return cls(0, float(x), x)
        if x < 0:
            raise DomainError("huge negative values are not supported in bound expressions")
        return cls(1, _ilog2(x), x)

    def lg(self) -> "_Est":
        if self.exact is not None:
            if self.exact <= 0:
                raise DomainError("logarithm of a non-positive value")
            return _Est(0, _ilog2(self.exact))
        if self.h >= 1:
            return _Est(self.h - 1, self.v)
        if self.v <= 0:
            raise DomainError("logarithm of a non-positive value")
        return _Est(0, math.log2(self.v))

    def log2_float(self) -> float | None:
        """log2 of the value as a float, or None when that overflows."""
        if self.exact is not None:
            return _ilog2(self.exact) if self.exact > 0 else None
        if self.h == 0:
            return math.log2(self.v) if self.v > 0 else None
        if self.h == 1:
            return self.v
        return None

    def key(self) -> tuple:
        return (self.h, self.v)


class _Evaluator:
    def __init__(self, eval_bits: int):
        self.limit = eval_bits
        self.cache: dict = {}

    def est(self, node: BoundExpr) -> _Est:
        hit = self.cache.get(id(node))
        if hit is not None and hit[0] is node:
            return hit[1]
        value = self._est(node)
        self.cache[id(node)] = (node, value)
        return value

    def _est(self, node):
        if isinstance(node, Int):
            return _Est.of_int(node.value)
        if isinstance(node, Add):
            return self.add([self.est(a) for a in node.args])
        if isinstance(node, Mul):
            return self.mul([self.est(a) for a in node.args])
        if isinstance(node, Pow):
            return self.pow(self.est(node.base), self.est(node.exp))
        if isinstance(node, Binom):
            return self.binom(self.est(node.n), self.est(node.k))
        if isinstance(node, Quot):
            return self.quot(node, self.est(node.num), self.est(node.den))
        raise TypeError(f"unknown bound node {node!r}")

    def exact_or_none(self, value: int | None, bits: float) -> int | None:
        return value if bits <= self.limit else None

    def ex(self, e: _Est) -> _Est:
        """2^e."""
        if e.exact is not None and e.exact <= self.limit:
            if e.exact < 0:
                return _Est(0, 2.0**e.exact)
            return _Est.of_int(1 << e.exact)
        return _Est(*_norm(e.h + 1, e.v))

    def add(self, ests: list) -> _Est:
        if all(e.exact is not None for e in ests):
            return _Est.of_int(sum(e.exact for e in ests))
        small = 0.0
        bigs = []
        for e in ests:
            if e.h == 0:
                small += e.exact if e.exact is not None else e.v
            else:
                bigs.append(e)
        if not bigs:
            return _Est(0, small)
        top = max(bigs, key=_Est.key)
        if top.h >= 2:
            return _Est(top.h, top.v)
        lmax = top.v
        total = lmax + math.log2(sum(2.0 ** (e.v - lmax) for e in bigs))
        if small:
            ratio = math.copysign(2.0 ** (math.log2(abs(small)) - total), small)
            total += math.log1p(ratio) / math.log(2)
        return _Est(*_norm(1, total))

    def mul(self, ests: list) -> _Est:
        if any(e.exact == 0 for e in ests):
            return _Est.of_int(0)
        if all(e.exact is not None for e in ests):
            bits = sum(abs(e.exact).bit_length() for e in ests)
            if bits <= self.limit:
                return _Est.of_int(reduce(lambda a, b: a * b, (e.exact for e in ests), 1))
        if any((e.exact is not None and e.exact < 0) or (e.exact is None and e.h == 0 and e.v < 0) for e in ests):
            raise DomainError("negative factors of huge products are not supported")
        return self.ex(self.add([e.lg() for e in ests]))

    def pow(self, b: _Est, e: _Est) -> _Est:
        if e.exact is not None and e.exact < 0:
            raise DomainError("negative exponents are not supported")
        if e.exact == 0:
            return _Est.of_int(1)
        if b.exact is not None and b.exact in (0, 1):
            return _Est.of_int(b.exact)
        if b.exact is not None and e.exact is not None:
            bits = e.exact * _ilog2(abs(b.exact)) if e.exact.bit_length() < 1000 else math.inf
            if bits <= self.limit:
                return _Est.of_int(b.exact**e.exact)
        return self.ex(self.mul([e, b.lg()]))

    def binom(self, n: _Est, k: _Est) -> _Est:
        if k.exact is None or k.exact < 0 or k.exact > 10**6:
            raise DomainError("binomial lower index must be a small natural number")
        kk = k.exact
        if n.exact is not None:
            if n.exact < 0:
                raise DomainError("binomial upper index must be non-negative")
            lg_n = _ilog2(n.exact) if n.exact > 0 else 0.0
            if kk * lg_n <= self.limit:
                return _Est.of_int(math.comb(n.exact, kk))
        # binom(n, k) ~ n^k / k! for n much larger than k
        lg_fact = math.lgamma(kk + 1) / math.log(2)
        return self.ex(self.add([self.mul([_Est.of_int(kk), n.lg()]), _Est(0, -lg_fact)]))

    def quot(self, node: Quot, a: _Est, b: _Est) -> _Est:
        if b.exact is None or b.exact <= 0:
            raise DomainError("exact-quotient denominators must be positive integers of moderate size")
        if a.exact is not None:
            q, r = divmod(a.exact, b.exact)
            if r:
                raise QuotientError(f"{a.exact} is not divisible by {b.exact}")
            return _Est.of_int(q)
        if self.mod(node.num, b.exact) != 0:
            raise QuotientError(f"{to_str(node.num)} is not divisible by {b.exact}")
        return self.ex(self.add([a.lg(), _Est(0, -_ilog2(b.exact))]))

    def mod(self, node: BoundExpr, q: int) -> int:
        """node mod q without materializing node."""
        if q == 1:
            return 0
        if isinstance(node, Int):
            return node.value % q
        if isinstance(node, Add):
            return sum(self.mod(a, q) for a in node.args) % q
        if isinstance(node, Mul):
            return reduce(lambda acc, a: acc * self.mod(a, q) % q, node.args, 1 % q)
        if isinstance(node, Binom):
            n, k = self.est(node.n), self.est(node.k)
            if n.exact is None or k.exact is None:
                raise DomainError("cannot reduce a binomial with unmaterialized arguments")
            return math.comb(n.exact, k.exact) % q
        if isinstance(node, Pow):
            b = self.mod(node.base, q)
            e = self.est(node.exp)
            if e.exact is not None:
                return pow(b, e.exact, q)
            # e is astronomically larger than log2 q, where b^e = b^(phi + e mod phi) (mod q)
            from sympy import totient

            phi = int(totient(q))
            return pow(b, phi + self.mod(node.exp, phi), q)
        if isinstance(node, Quot):
            d = self.est(node.den)
            if d.exact is None or d.exact <= 0:
                raise DomainError("exact-quotient denominators must be positive integers")
            r = self.mod(node.num, d.exact * q)
            if r % d.exact:
                raise QuotientError(f"{to_str(node.num)} is not divisible by {d.exact}")
            return (r // d.exact) % q
        raise TypeError(f"unknown bound node {node!r}")


def eval_bound(e: BoundExpr, budget: Budget | None = None) -> int | Magnitude:
    """Exact value if it fits ``budget.eval_bits`` bits, else a Magnitude."""
    budget = budget or DEFAULT_BUDGET
    est = _Evaluator(budget.eval_bits).est(e)
    if est.exact is not None:
        return est.exact
    return Magnitude(est.h, est.v)


def magnitude(e: BoundExpr, budget: Budget | None = None) -> Magnitude:
    """Iterated-log magnitude of e, even when e could be evaluated exactly."""
    value = eval_bound(e, budget)
    if isinstance(value, Magnitude):
        return value
    if value <= 0 or value.bit_length() <= 1000:
        return Magnitude(0, float(value))
    return Magnitude(*_norm(1, _ilog2(value)))


def magnitude_approx(e: BoundExpr) -> Magnitude:
    """Magnitude computed purely in log space (exact values only below 64 bits)."""
    est = _Evaluator(64).est(e)
    if est.exact is not None:
        return magnitude(Int(est.exact))
    return Magnitude(est.h, est.v)


def fold(e: BoundExpr, bits: int = FOLD_BITS) -> BoundExpr:
    """Normal form for structural comparison.

    Subtrees whose value has at most ``bits`` bits become literals; products
    drop unit factors, sums combine literals, nested sums and products flatten.
    """
    ev = _Evaluator(bits)

    def go(node):
        est = ev.est(node)
        if est.exact is not None:
            return Int(est.exact)
        if isinstance(node, Add):
            flat, const = [], 0
            for a in map(go, node.args):
                parts = a.args if isinstance(a, Add) else (a,)
                for p in parts:
                    if isinstance(p, Int):
                        const += p.value
                    else:
                        flat.append(p)
            if const:
                flat.append(Int(const))
            return flat[0] if len(flat) == 1 else Add(tuple(flat))
        if isinstance(node, Mul):
            flat, const = [], 1
            for a in map(go, node.args):
                parts = a.args if isinstance(a, Mul) else (a,)
                for p in parts:
                    if isinstance(p, Int):
                        const *= p.value
                    else:
                        flat.append(p)
            if const != 1:
                flat.insert(0, Int(const))
            return flat[0] if len(flat) == 1 else Mul(tuple(flat))
        if isinstance(node, Pow):
            b, x = go(node.base), go(node.exp)
            if x == Int(1):
                return b
            return Pow(b, x)
        if isinstance(node, Binom):
            return Binom(go(node.n), go(node.k))
        if isinstance(node, Quot):
            return Quot(go(node.num), go(node.den))
        return node

    return go(e)


def structurally_equal(a: BoundExpr, b: BoundExpr) -> bool:
    return fold(a) == fold(b)


# rendering and serialization

_PREC = {Add: 1, Mul: 2, Quot: 2, Pow: 3}


def to_str(e: BoundExpr) -> str:
    def go(node, parent=0):
        if isinstance(node, Int):
            s = str(node.value)
            return f"({s})" if node.value < 0 and parent > 1 else s
        if isinstance(node, Binom):
            return f"binom({go(node.n)}, {go(node.k)})"
        prec = _PREC[type(node)]
        if isinstance(node, Add):
            s = " + ".join(go(a, prec) for a in node.args).replace("+ -", "- ")
        elif isinstance(node, Mul):
            s = "*".join(go(a, prec) for a in node.args)
        elif isinstance(node, Quot):
            s = f"{go(node.num, prec)}/{go(node.den, prec + 1)}"
        else:
            s = f"{go(node.base, prec + 1)}^{go(node.exp, prec + 1)}"
        return f"({s})" if prec <= parent else s

    return go(e)


def to_json(e: BoundExpr) -> dict:
    if isinstance(e, Int):
        return {"op": "int", "value": str(e.value)}
    if isinstance(e, Binom):
        return {"op": "binom", "args": [to_json(e.n), to_json(e.k)]}
    if isinstance(e, Add):
        return {"op": "add", "args": [to_json(a) for a in e.args]}
    if isinstance(e, Mul):
        return {"op": "mul", "args": [to_json(a) for a in e.args]}
    if isinstance(e, Pow):
        return {"op": "pow", "args": [to_json(e.base), to_json(e.exp)]}
    if isinstance(e, Quot):
        return {"op": "quot", "args": [to_json(e.num), to_json(e.den)]}
    raise TypeError(f"unknown bound node {e!r}")


def from_json(obj: dict) -> BoundExpr:
    op = obj.get("op")
    if op == "int":
        return Int(int(obj["value"]))
    args = [from_json(a) for a in obj.get("args", [])]
    if op in ("binom", "pow", "quot") and len(args) != 2:
        raise DomainError(f"{op} node needs exactly two arguments")
    if op == "binom":
        return Binom(*args)
    if op == "pow":
        return Pow(*args)
    if op == "quot":
        return Quot(*args)
    if op == "add":
        return Add(tuple(args))
    if op == "mul":
        return Mul(tuple(args))
    raise DomainError(f"unknown bound node op {op!r}")


# formulas


def _positive(name, value, minimum=1):
    if not isinstance(value, int) or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")


def bl_dimension(dimV: int, m: int, ell: int) -> int:
    _positive("dimV", dimV, 0)
    return alpha(m, ell) * dimV


def bl_degree_bound(degV: int, m: int, ell: int) -> BoundExpr:
    _positive("degV", degV)
    return power(degV, alpha_expr(m, ell))


def tau_degree_bounds(
    degV: int, n: int, m: int, ell: int, D: int | None = None, hypersurface: bool = True
) -> BoundExpr:
    """(deg H)^{alpha_ell} for a hypersurface, else D^{n alpha_ell + 1}."""
    _positive("degV", degV)
    alpha(m, ell)
    if hypersurface:
        return power(degV, alpha_expr(m, ell))
    if D is None:
        raise DomainError("general varieties need the radical-generator degree D")
    _positive("D", D)
    _positive("n", n)
    return power(D, add(mul(n, alpha_expr(m, ell)), 1))


def bezout(degrees) -> BoundExpr:
    degrees = list(degrees)
    if not degrees:
        raise DomainError("bezout needs at least one degree")
    for d in degrees:
        _positive("degree", d)
    return Int(degrees[0]) if len(degrees) == 1 else mul(*degrees)


def project(deg: int) -> BoundExpr:
    _positive("degree", deg)
    return Int(deg)


def _check_dims(m, n, d):
    _positive("m", m)
    _positive("n", n)
    if not isinstance(d, int) or not 0 <= d <= n:
        raise DomainError(f"need 0 <= d <= n, got d={d}, n={n}")


def _v_exponent(m: int, T: int, d_expr: BoundExpr, factor: BoundExpr | None = None) -> BoundExpr:
    # alpha_T (m+1)^{d alpha_{T-1} - 1}, optionally scaled by factor
    core = mul(alpha_expr(m, T), power(m + 1, add(mul(d_expr, alpha_expr(m, T - 1)), -1)))
    return core if factor is None else mul(factor, core)


def _w_exponent(m: int, T: int, d_expr: BoundExpr) -> BoundExpr:
    # alpha_{T-1} ((m+1)^{d alpha_{T-1}} - 1) / m
    a1 = alpha_expr(m, T - 1)
    return quot(mul(a1, add(power(m + 1, mul(d_expr, a1)), -1)), m)


def _degenerate(m: int, T: int, degV: int, degW: int, factor: int = 1) -> BoundExpr:
    aT = alpha(m, T)
    ceil = -(-factor * aT // (m + 1))
    e = mul(power(degV, ceil), power(degW, 0))
    e.meta.update(
        degenerate=True,
        note="effective dimension 0: exponent alpha_T*(m+1)^(-1) rounded up, no degW factor",
    )
    return e


def uniform_bound_first_order(m: int, n: int, d: int, degV: int, degW: int, budget: Budget | None = None) -> BoundExpr:
    """(degV)^{alpha_T (m+1)^{d alpha_{T-1}-1}} (degW)^{alpha_{T-1}((m+1)^{d alpha_{T-1}}-1)/m}, T = T_1^{m,n}."""
    _check_dims(m, n, d)
    _positive("degV", degV)
    _positive("degW", degW)
    T = T_bound(m, n, 1, budget)
    if d == 0:
        return _degenerate(m, T, degV, degW)
    e = mul(power(degV, _v_exponent(m, T, Int(d))), power(degW, _w_exponent(m, T, Int(d))))
    e.meta.update(T=T, degenerate=False)
    return e


def bound_positive_dim(
    m: int, n: int, d: int, d0: int, degV: int, degW: int, budget: Budget | None = None
) -> BoundExpr:
    """First-order bound with d replaced by d - d0."""
    _check_dims(m, n, d)
    if not isinstance(d0, int) or not 0 <= d0 <= d:
        raise DomainError(f"need 0 <= d0 <= d, got d0={d0}, d={d}")
    return uniform_bound_first_order(m, n, d - d0, degV, degW, budget)


def bound_higher_order(
    m: int, n: int, ell: int, d: int, degV: int, degW: int, budget: Budget | None = None
) -> BoundExpr:
    """Order-ell bound with n' = n alpha_{ell-1}, d' = d alpha_{ell-1}, T' = T_1^{m,n'}."""
    _check_dims(m, n, d)
    _positive("ell", ell)
    _positive("degV", degV)
    _positive("degW", degW)
    a_prev = alpha(m, ell - 1)
    T = T_bound(m, n * a_prev, 1, budget)
    if d == 0:
        return _degenerate(m, T, degV, degW, a_prev)
    a_expr = alpha_expr(m, ell - 1)
    d_expr = mul(d, a_expr)
    e = mul(power(degV, _v_exponent(m, T, d_expr, a_expr)), power(degW, _w_exponent(m, T, d_expr)))
    e.meta.update(T=T, n_prime=n * a_prev, d_prime=d * a_prev, degenerate=False)
    return e


def bound_generator_degrees(m: int, n: int, D: int, r: int, s: int, budget: Budget | None = None) -> BoundExpr:
    """D^{(r+s) alpha_T (m+1)^{n alpha_{T-1}}}."""
    _positive("m", m)
    _positive("n", n)
    _positive("D", D)
    _positive("r", r, 0)
    _positive("s", s, 0)
    if r + s < 1:
        raise DomainError("need at least one equation (r + s >= 1)")
    T = T_bound(m, n, 1, budget)
    exponent = mul(add(r, s), alpha_expr(m, T), power(m + 1, mul(n, alpha_expr(m, T - 1))))
    e = power(D, exponent)
    e.meta.update(T=T)
    return e


def isogeny_bound(degV: int, d: int) -> BoundExpr:
    """(6 degV)^{2^{3d} - 1}."""
    _positive("degV", degV)
    _positive("d", d, 0)
    return power(mul(6, degV), add(power(2, mul(3, d)), -1))


def trajectory_exponents(m: int, n: int, s: int, budget: Budget | None = None):
    """Exponent pair of the step bound deg X_s, with the geometric sum expanded.

    Returns (alpha_T (m+1)^s, alpha_{T-1} sum_{i=0}^{s} (m+1)^i).
    """
    _positive("s", s, 0)
    if s > 10**5:
        raise DomainError("explicit trajectory sums are limited to 10^5 terms")
    T = T_bound(m, n, 1, budget)
    v = mul(alpha_expr(m, T), power(m + 1, s))
    w = mul(alpha_expr(m, T - 1), add(*[power(m + 1, i) for i in range(s + 1)]))
    return v, w


def trajectory_bound(m: int, n: int, s: int, degV: int, degW: int, budget: Budget | None = None) -> BoundExpr:
    """deg X_s <= (degV)^{alpha_T (m+1)^s} (degW)^{alpha_{T-1} sum_{i<=s} (m+1)^i}."""
    v, w = trajectory_exponents(m, n, s, budget=budget)
    return mul(power(degV, v), power(degW, w))


def first_order_exponents(m: int, n: int, d: int, budget: Budget | None = None):
    """Exponent pair of the first-order bound."""
    _check_dims(m, n, d)
    T = T_bound(m, n, 1, budget)
    return _v_exponent(m, T, Int(d)), _w_exponent(m, T, Int(d))


def trajectory_matches_first_order(m: int, n: int, d: int, budget: Budget | None = None) -> bool:
    """Check that the step bound at s = d alpha_{T-1} - 1 is the first-order bound."""
    T = T_bound(m, n, 1, budget)
    s = d * alpha(m, T - 1) - 1
    tv, tw = trajectory_exponents(m, n, s, budget=budget)
    hv, hw = first_order_exponents(m, n, d, budget)
    big = Budget(eval_bits=2**24)
    return eval_bound(tv, big) == eval_bound(hv, big) and eval_bound(tw, big) == eval_bound(hw, big)
