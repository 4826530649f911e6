"""Lazily evaluated monotone integer sequences with big-integer indices.

The antichain bounds are computed over sequences such as (2^i r), their tails
(a_{i+k}), and subsequences (a_{b_l}) picked out by recursively defined index
sequences b.  Every sequence memoizes the values it has produced and checks
monotonicity against its neighbours as values are cached.
"""

from __future__ import annotations

import re
import threading
from typing import Callable

from .budget import Meter, describe_int
from .errors import BudgetExceeded, DomainError, NonMonotoneSequence

TAIL_RULES = ("geometric", "linear", "constant")


class SequenceSpec:
    """Non-decreasing sequence of positive integers, indexed from 0."""

    key: tuple

    def __init__(self):
        self._cache: dict[int, int] = {}
        self._lock = threading.Lock()

    def at(self, i: int, meter: Meter | None = None) -> int:
        if i < 0:
            raise DomainError(f"sequence index must be non-negative, got {i}")
        hit = self._cache.get(i)
        if hit is not None:
            return hit
        meter = meter or Meter()
        value = self._compute(i, meter)
        self._store(i, value)
        return value

    def _compute(self, i: int, meter: Meter) -> int:
        raise NotImplementedError

    def _store(self, i: int, value: int) -> None:
        if value < 1:
            raise DomainError(f"sequence value a_{describe_int(i)} = {value} is not positive")
        with self._lock:
            before = self._cache.get(i - 1)
            after = self._cache.get(i + 1)
            if before is not None and before > value:
                raise NonMonotoneSequence(f"a_(i-1) = {describe_int(before)} > a_i = {describe_int(value)} at i = {describe_int(i)}")
            if after is not None and value > after:
                raise NonMonotoneSequence(f"a_i = {describe_int(value)} > a_(i+1) = {describe_int(after)} at i = {describe_int(i)}")
            self._cache[i] = value

    def constant_from(self) -> tuple[int, int] | None:
        """(K, v) if a_i = v for every i >= K is known structurally, else None."""
        return None

    def prefix(self, length: int, meter: Meter | None = None) -> list[int]:
        meter = meter or Meter()
        return [self.at(i, meter) for i in range(length)]

    def __eq__(self, other):
        return isinstance(other, SequenceSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}{self.key[1:]!r}"


class Geometric(SequenceSpec):
    """i -> 2^i r."""

    def __init__(self, r: int):
        super().__init__()
        if r < 1:
            raise DomainError(f"geometric ratio seed must be >= 1, got {r}")
        self.r = r
        self.key = ("geometric", r)

    def _compute(self, i, meter):
        meter.check_bits(i + self.r.bit_length(), lambda: f"2^i*{self.r} at i = {describe_int(i)}")
        return self.r << i

    def literal(self) -> str:
        return f"geometric:r={self.r}"


class Linear(SequenceSpec):
    """i -> start + step*i."""

    def __init__(self, start: int = 1, step: int = 1):
        super().__init__()
        if start < 1 or step < 0:
            raise DomainError("linear sequences need start >= 1 and step >= 0")
        self.start = start
        self.step = step
        self.key = ("linear", start, step)

    def _compute(self, i, meter):
        return self.start + self.step * i

    def constant_from(self):
        return (0, self.start) if self.step == 0 else None

    def literal(self) -> str:
        return f"linear:start={self.start},step={self.step}"


class Explicit(SequenceSpec):
    """Explicit prefix v_0..v_k, continued by a named tail rule.

    Tails: ``geometric`` doubles the last value each step, ``linear`` adds 1,
    ``constant`` repeats it.
    """

    def __init__(self, values, tail: str = "geometric"):
        super().__init__()
        values = tuple(int(v) for v in values)
        if not values:
            raise DomainError("explicit sequence needs at least one value")
        if any(v < 1 for v in values):
            raise DomainError("explicit sequence values must be positive")
        if any(a > b for a, b in zip(values, values[1:])):
            raise NonMonotoneSequence(f"explicit prefix {list(values)} is not non-decreasing")
        if tail not in TAIL_RULES:
            raise DomainError(f"unknown tail rule {tail!r}; expected one of {TAIL_RULES}")
        self.values = values
        self.tail = tail
        self.key = ("explicit", values, tail)

    def _compute(self, i, meter):
        if i < len(self.values):
            return self.values[i]
        last = self.values[-1]
        j = i - len(self.values) + 1
        if self.tail == "geometric":
            meter.check_bits(j + last.bit_length(), lambda: f"explicit tail at i = {describe_int(i)}")
            return last << j
        if self.tail == "linear":
            return last + j
        return last

    def constant_from(self):
        if self.tail == "constant":
            return (len(self.values) - 1, self.values[-1])
        return None

    def literal(self) -> str:
        return f"explicit:[{','.join(map(str, self.values))}]:then={self.tail}"


class Shifted(SequenceSpec):
    """The tail (a_{i+offset} : i >= 0)."""

    def __init__(self, base: SequenceSpec, offset: int):
        super().__init__()
        self.base = base
        self.offset = offset
        self.key = ("shifted", base.key, offset)

    def _compute(self, i, meter):
        return self.base.at(i + self.offset, meter)

    def constant_from(self):
        tail = self.base.constant_from()
        if tail is None:
            return None
        return (max(0, tail[0] - self.offset), tail[1])


class IndexSequence:
    """Strictly increasing b with b_0 = 0 and b_{l+1} = step(b_l).

    ``step`` receives the previous value and the active meter.  ``key`` must
    describe the step rule structurally; it is what memo tables hash.
    """

    def __init__(self, step: Callable[[int, Meter], int], key: tuple):
        self._step = step
        self.key = key
        self._values = [0]
        self._lock = threading.RLock()

    def at(self, l: int, meter: Meter | None = None) -> int:
        if l < 0:
            raise DomainError(f"index sequence position must be non-negative, got {l}")
        if l < len(self._values):
            return self._values[l]
        meter = meter or Meter()
        if l - len(self._values) >= meter.budget.steps:
            raise BudgetExceeded(
                "steps", meter.budget.steps, meter.depth, f"index sequence position {describe_int(l)}"
            )
        with self._lock:
            while len(self._values) <= l:
                meter.tick()
                prev = self._values[-1]
                nxt = self._step(prev, meter)
                if nxt <= prev:
                    raise NonMonotoneSequence(f"index sequence stalled at {describe_int(prev)} -> {describe_int(nxt)}")
                self._values.append(nxt)
        return self._values[l]

    @property
    def computed(self) -> tuple:
        return tuple(self._values)

    def __repr__(self):
        return f"IndexSequence(computed={len(self._values)})"


class Composed(SequenceSpec):
    """The subsequence (a_{b_l} : l >= 0)."""

    def __init__(self, base: SequenceSpec, index: IndexSequence):
        super().__init__()
        self.base = base
        self.index = index
        self.key = ("composed", base.key, index.key)

    def _compute(self, i, meter):
        tail = self.constant_from()
        if tail is not None and i >= tail[0]:
            return tail[1]
        return self.base.at(self.index.at(i, meter), meter)

    def constant_from(self):
        # b is strictly increasing from 0, so b_i >= i
        return self.base.constant_from()


def geometric(r: int = 1) -> Geometric:
    return Geometric(r)


def shifted(seq: SequenceSpec, offset: int) -> SequenceSpec:
    """Tail of seq from offset; nested shifts collapse into one."""
    if offset < 0:
        raise DomainError(f"shift offset must be non-negative, got {offset}")
    if offset == 0:
        return seq
    if isinstance(seq, Shifted):
        return Shifted(seq.base, seq.offset + offset)
    return Shifted(seq, offset)


def composed(seq: SequenceSpec, index: IndexSequence) -> Composed:
    return Composed(seq, index)


_PARAMS = re.compile(r"^\s*(\w+)\s*=\s*(\d+)\s*$")


def _params(text: str) -> dict[str, int]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        match = _PARAMS.match(part)
        if not match:
            raise DomainError(f"bad sequence parameter {part!r}")
        out[match.group(1)] = int(match.group(2))
    return out


def parse_sequence(text: str) -> SequenceSpec:
    """Parse a CLI sequence literal.

    >>> parse_sequence("geometric:r=2").prefix(3)
    [2, 4, 8]
    >>> parse_sequence("explicit:[1,1,3]:then=linear").prefix(5)
    [1, 1, 3, 4, 5]
    """
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "geometric":
        params = _params(rest)
        unknown = set(params) - {"r"}
        if unknown:
            raise DomainError(f"unknown geometric parameters {sorted(unknown)}")
        return Geometric(params.get("r", 1))
    if kind == "linear":
        params = _params(rest)
        unknown = set(params) - {"start", "step"}
        if unknown:
            raise DomainError(f"unknown linear parameters {sorted(unknown)}")
        return Linear(params.get("start", 1), params.get("step", 1))
    if kind == "explicit":
        match = re.match(r"^\s*\[([^\]]*)\]\s*(?::\s*then\s*=\s*(\w+)\s*)?$", rest)
        if not match:
            raise DomainError(f"bad explicit sequence literal {text!r}")
        try:
            values = [int(v) for v in match.group(1).split(",") if v.strip()]
        except ValueError as exc:
            raise DomainError(f"bad explicit sequence values in {text!r}") from exc
        return Explicit(values, match.group(2) or "geometric")
    raise DomainError(f"unknown sequence kind {kind!r} in {text!r}")
