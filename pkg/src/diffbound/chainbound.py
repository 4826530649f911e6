"""Antichain chain bounds t(m, n, (a_i)) and prolongation depths T_r^{m,n}.

``t_bound`` returns a length t such that no chain S_0 <= S_1 <= ... <= S_t of
antichains of (N^m x n, <=) with S_k inside {(xi, i) : |xi| <= a_k} is strictly
increasing.  Two derivations are handled in closed form; three or more use
the layered bound-function recursion, whose values grow like an Ackermann
function, so in practice those calls end in :class:`BudgetExceeded` unless
the sequence is tiny (e.g. constant).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .budget import Budget, Meter
from .errors import BudgetExceeded, DomainError
from .sequences import (
    IndexSequence,
    SequenceSpec,
    composed,
    geometric,
    shifted,
)

_MEMO: dict[tuple, int] = {}
_MEMO_LOCK = threading.Lock()


class BoundFunction:
    """g(k) = t(m, n, (d_i : i >= k)) for a fixed sequence d."""

    def __init__(self, m: int, n: int, seq: SequenceSpec):
        self.m = m
        self.n = n
        self.seq = seq
        self.key = ("bound", m, n, seq.key)

    def __call__(self, k: int, meter: Meter) -> int:
        return _t(self.m, self.n, shifted(self.seq, k), meter)

    def __repr__(self):
        return f"BoundFunction(m={self.m}, n={self.n}, seq={self.seq!r})"


def cumulative(f: BoundFunction) -> IndexSequence:
    """b_0 = 0, b_{l+1} = f(b_l) + b_l."""
    return IndexSequence(lambda b, meter: f(b, meter) + b, ("cumulative", f.key))


def nested(prev: IndexSequence, f: BoundFunction) -> IndexSequence:
    """b_0 = 0, b_{l+1} = prev_{f(b_l)} + b_l."""
    return IndexSequence(
        lambda b, meter: prev.at(f(b, meter), meter) + b, ("nested", prev.key, f.key)
    )


@dataclass
class Layers:
    """The interleaved eliminations used for t(m, 1, a) when m > 2.

    ``fs[i]`` is f_i and ``bs[i]`` is b^i (index 0 unused); ``final_b`` and
    ``final_f`` are the closing b and f with t = final_b[final_f(0)].
    """

    m: int
    p: int
    fs: list
    bs: list
    final_b: IndexSequence
    final_f: BoundFunction


def layered_sequences(m: int, seq: SequenceSpec, meter: Meter | None = None) -> Layers:
    if m < 3:
        raise DomainError("layered recursion applies to m >= 3 only")
    meter = meter or Meter()
    a = seq.at(1, meter)
    p = m * (a + 1) - 1
    if p > meter.budget.steps:
        raise BudgetExceeded("steps", meter.budget.steps, meter.depth, f"p = {p} layers")
    # the slices S^{i,j} fix one entry of xi, so they live in N^(m-1) x 1
    fs: list = [None, BoundFunction(m - 1, 1, seq)]
    bs: list = [None, cumulative(fs[1])]
    fs.append(BoundFunction(m - 1, 1, composed(seq, bs[1])))
    for i in range(2, p):
        bs.append(nested(bs[i - 1], fs[i]))
        fs.append(BoundFunction(m - 1, 1, composed(seq, bs[i])))
    final_b = nested(bs[p - 1], fs[p])
    final_f = BoundFunction(m - 1, 1, composed(seq, final_b))
    return Layers(m, p, fs, bs, final_b, final_f)


def _t(m: int, n: int, seq: SequenceSpec, meter: Meter) -> int:
    if m < 1 or n < 1:
        raise DomainError(f"t(m, n, .) needs m, n >= 1, got m={m}, n={n}")
    key = (m, n, seq.key)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    meter.enter()
    try:
        meter.tick()
        if m == 1:
            value = n + 1
        elif m == 2:
            b = 0
            for _ in range(n):
                meter.tick()
                b = seq.at(b + 1, meter) + b + 1
            value = b + 1
        elif n == 1:
            layers = layered_sequences(m, seq, meter)
            value = layers.final_b.at(layers.final_f(0, meter), meter)
        else:
            f = BoundFunction(m, 1, seq)
            b = cumulative(f)
            g = BoundFunction(m, n - 1, composed(seq, b))
            value = b.at(g(0, meter), meter)
    finally:
        meter.leave()
    with _MEMO_LOCK:
        _MEMO[key] = value
    return value


def t_bound(m: int, n: int, seq: SequenceSpec, budget: Budget | None = None) -> int:
    """Exact t(m, n, seq); raises BudgetExceeded rather than approximating."""
    return _t(m, n, seq, Meter(budget))


def T_bound(m: int, n: int, r: int, budget: Budget | None = None) -> int:
    """T_r^{m,n}: r when m = 1, else 2^{t(m, n, (2^i r))} r."""
    if m < 1 or n < 1 or r < 1:
        raise DomainError(f"T_bound needs m, n, r >= 1, got m={m}, n={n}, r={r}")
    if m == 1:
        return r
    meter = Meter(budget)
    t = _t(m, n, geometric(r), meter)
    meter.check_bits(t + r.bit_length(), f"2^{{t}}*{r} with t of {t.bit_length()} bits")
    return r << t


def seq_at(seq: SequenceSpec, i: int, budget: Budget | None = None) -> int:
    return seq.at(i, Meter(budget))


def clear_memo() -> None:
    with _MEMO_LOCK:
        _MEMO.clear()
