"""Resource limits and the per-evaluation meter that enforces them."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, replace

from .errors import BudgetExceeded

ENV_PREFIX = "DIFFBOUND_"


@dataclass(frozen=True)
class Budget:
    """Resource guards.

    bits: largest integer (in bits) an exact computation may materialize.
    steps: total elementary recursion/iteration steps per evaluation.
    seconds: wall-clock limit per evaluation, ``None`` for no limit.
    enumeration: largest list an enumeration may produce.
    eval_bits: exact-evaluation threshold for bound expressions; beyond it
        :func:`diffbound.bounds.eval_bound` returns a magnitude.
    terms: largest polynomial (in terms) an intermediate result may hold.
    """

    bits: int = 2**28
    steps: int = 10**6
    seconds: float | None = None
    enumeration: int = 10**7
    eval_bits: int = 2**26
    terms: int = 10**6

    def __post_init__(self):
        for name in ("bits", "steps", "enumeration", "eval_bits", "terms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"budget guard {name} must be positive")
        if self.seconds is not None and self.seconds <= 0:
            raise ValueError("budget guard seconds must be positive")

    def with_(self, **changes) -> "Budget":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_env(cls, environ=None) -> "Budget":
        """Defaults overridden by ``DIFFBOUND_BIT_GUARD`` and friends."""
        environ = os.environ if environ is None else environ
        names = {
            "BIT_GUARD": ("bits", int),
            "STEP_GUARD": ("steps", int),
            "TIME_GUARD": ("seconds", float),
            "ENUM_GUARD": ("enumeration", int),
            "EVAL_BITS": ("eval_bits", int),
            "TERM_GUARD": ("terms", int),
        }
        changes = {}
        for suffix, (field, conv) in names.items():
            raw = environ.get(ENV_PREFIX + suffix)
            if raw is not None and raw.strip():
                changes[field] = conv(raw)
        return cls(**changes)


DEFAULT_BUDGET = Budget()


class Meter:
    """Counts steps and recursion depth for one top-level evaluation."""

    def __init__(self, budget: Budget | None = None):
        self.budget = budget or DEFAULT_BUDGET
        self.steps = 0
        self.depth = 0
        self.max_depth = 0
        self._start = time.monotonic()

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget.steps:
            raise BudgetExceeded("steps", self.budget.steps, self.depth)
        if self.budget.seconds is not None and (self.steps & 0xFF) == 0:
            self.check_time()

    def check_time(self) -> None:
        if self.budget.seconds is not None:
            if time.monotonic() - self._start > self.budget.seconds:
                raise BudgetExceeded("time", self.budget.seconds, self.depth)

    def check_bits(self, bits: int, what="") -> None:
        """``what`` may be a callable so the message is only built on failure."""
        if bits > self.budget.bits:
            raise BudgetExceeded("bits", self.budget.bits, self.depth, what() if callable(what) else what)

    def enter(self) -> None:
        self.depth += 1
        if self.depth > self.max_depth:
            self.max_depth = self.depth

    def leave(self) -> None:
        self.depth -= 1


def describe_int(v: int) -> str:
    """Decimal for moderate integers, a bit length otherwise."""
    return str(v) if v.bit_length() <= 64 else f"<{v.bit_length()}-bit integer>"
