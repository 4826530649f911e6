import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffbound.budget import Budget
from diffbound.chainbound import T_bound, clear_memo, seq_at, t_bound
from diffbound.errors import BudgetExceeded, DomainError, NonMonotoneSequence
from diffbound.sequences import Explicit, SequenceSpec, Linear, geometric, parse_sequence, shifted


def test_reference_values():
    assert [t_bound(2, n, geometric(1)) for n in (1, 2, 3)] == [4, 21, 2097174]
    assert T_bound(2, 1, 1) == 16
    assert T_bound(2, 2, 1) == 2097152


def test_T_large_is_a_power_of_two():
    value = T_bound(2, 3, 1)
    assert value == 1 << 2097174
    assert value.bit_length() == 2097175
    digits = format(value, "x")
    assert digits == "4" + "0" * 524293


def test_T_m1_is_r():
    assert T_bound(1, 5, 7) == 7


def test_T_beyond_bit_guard():
    with pytest.raises(BudgetExceeded) as info:
        T_bound(2, 4, 1)
    assert info.value.kind == "bits"


@pytest.mark.parametrize("seq", [geometric(1), geometric(5), Linear(2, 3)])
def test_m1_is_n_plus_one(seq):
    for n in range(1, 8):
        assert t_bound(1, n, seq) == n + 1


def _independent_t(n, a):
    """Plain m = 2 recurrence with a as a python callable."""
    b = 0
    for _ in range(n):
        b = a(b + 1) + b + 1
    return b + 1


@pytest.mark.parametrize(
    "n,seq,fn",
    [
        (1, geometric(1), lambda i: 2**i),
        (2, geometric(1), lambda i: 2**i),
        (2, Linear(1, 1), lambda i: i + 1),
        (2, geometric(2), lambda i: 2 * 2**i),
        (3, Linear(1, 1), lambda i: i + 1),
        (2, Explicit([1, 1, 1], tail="constant"), lambda i: 1),
    ],
)
def test_against_independent_loop(n, seq, fn):
    clear_memo()
    assert t_bound(2, n, seq) == _independent_t(n, fn)


def test_constant_sequences_closed_forms():
    for c in range(1, 5):
        for n in range(1, 5):
            assert t_bound(2, n, Explicit([c], tail="constant")) == n * (c + 1) + 1
    assert t_bound(3, 1, Explicit([1], tail="constant")) == 729
    assert t_bound(3, 1, Explicit([2], tail="constant")) == 262144


def test_step_guard():
    with pytest.raises(BudgetExceeded):
        t_bound(3, 1, geometric(1), Budget(steps=10**5))


def test_strictly_monotone_in_n():
    for m in (1, 2):
        values = [t_bound(m, n, geometric(1)) for n in range(1, 5)]
        assert all(a < b for a, b in zip(values, values[1:]))


def test_n5_exceeds_bit_guard():
    with pytest.raises(BudgetExceeded) as info:
        t_bound(2, 5, geometric(1))
    assert info.value.kind == "bits"


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_geometric_grid_against_independent_loop(n, r):
    if n == 4 and r > 1:
        # b_3 already has more than 130 bits, so t has about 2^b_3 bits
        with pytest.raises(BudgetExceeded):
            t_bound(2, n, geometric(r))
        return
    assert t_bound(2, n, geometric(r)) == _independent_t(n, lambda i: r << i)


@given(st.integers(1, 4), st.integers(1, 2))
def test_monotone_in_sequence(r, n):
    assert t_bound(2, n, geometric(r)) <= t_bound(2, n, geometric(r + 1))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6), st.integers(1, 3))
def test_m2_matches_recurrence_on_explicit_prefixes(steps, n):
    values = [1]
    for s in steps:
        values.append(values[-1] + s)
    seq = Explicit(values, tail="linear")
    assert t_bound(2, n, seq) == _independent_t(n, lambda i: seq.at(i))


def test_domain_errors():
    with pytest.raises(DomainError):
        t_bound(0, 1, geometric(1))
    with pytest.raises(DomainError):
        t_bound(2, 0, geometric(1))
    with pytest.raises(DomainError):
        geometric(0)


def test_non_monotone_sequence():
    with pytest.raises(NonMonotoneSequence):
        parse_sequence("explicit:[3,1]:then=geometric")

    class Zigzag(SequenceSpec):
        key = ("zigzag",)

        def _compute(self, i, meter):
            return 3 if i % 2 == 0 else 2

    with pytest.raises(NonMonotoneSequence):
        Zigzag().prefix(3)


def test_parse_sequence_forms():
    assert parse_sequence("geometric:r=3").prefix(4) == [3, 6, 12, 24]
    assert parse_sequence("linear:start=2,step=3").prefix(3) == [2, 5, 8]
    assert parse_sequence("explicit:[1,2]:then=geometric").prefix(4) == [1, 2, 4, 8]
    with pytest.raises(DomainError):
        parse_sequence("fibonacci")


def test_shifted_and_seq_at():
    s = shifted(geometric(1), 3)
    assert seq_at(s, 0) == 8
    assert shifted(s, 2) == shifted(geometric(1), 5)
    assert math.log2(seq_at(geometric(1), 100)) == 100
