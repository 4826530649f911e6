import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffbound import bounds as B
from diffbound.budget import Budget
from diffbound.errors import BudgetExceeded, DomainError, QuotientError


def test_bl_examples():
    assert B.bl_dimension(0, 2, 5) == 0
    assert B.bl_dimension(1, 1, 2) == 3
    assert B.bl_dimension(2, 2, 1) == 6
    assert B.eval_bound(B.bl_degree_bound(1, 2, 3)) == 1
    assert B.eval_bound(B.bl_degree_bound(2, 1, 1)) == 4
    assert B.eval_bound(B.bl_degree_bound(3, 2, 1)) == 27


def test_tau_examples():
    assert B.eval_bound(B.tau_degree_bounds(2, 1, 1, 2)) == 8
    assert B.eval_bound(B.tau_degree_bounds(1, 1, 2, 4)) == 1
    assert B.eval_bound(B.tau_degree_bounds(1, 2, 1, 1, D=5, hypersurface=False)) == 5**5
    with pytest.raises(DomainError):
        B.tau_degree_bounds(2, 2, 1, 1, hypersurface=False)


def test_bezout_and_projection():
    assert B.eval_bound(B.bezout([2, 3])) == 6
    assert B.eval_bound(B.bezout([9])) == 9
    assert B.eval_bound(B.project(7)) == 7
    with pytest.raises(DomainError):
        B.bezout([])


def test_first_order_small():
    assert B.eval_bound(B.uniform_bound_first_order(1, 1, 1, 2, 3)) == 12
    assert B.eval_bound(B.uniform_bound_first_order(1, 2, 2, 2, 2)) == 128


def test_first_order_m2_magnitude():
    e = B.uniform_bound_first_order(2, 1, 1, 2, 2)
    assert e.meta["T"] == 16
    mag = B.eval_bound(e)
    assert isinstance(mag, B.Magnitude) and mag.height == 1
    exact_log = 153 * 3**135 + 68 * (3**136 - 1)
    assert abs(mag.value - exact_log) / exact_log < 1e-6


def test_positive_dim():
    assert B.structurally_equal(
        B.bound_positive_dim(1, 3, 2, 0, 2, 3), B.uniform_bound_first_order(1, 3, 2, 2, 3)
    )
    assert B.eval_bound(B.bound_positive_dim(1, 3, 3, 2, 2, 3)) == 12
    degenerate = B.bound_positive_dim(1, 3, 2, 2, 5, 7)
    assert degenerate.meta["degenerate"] is True
    # alpha_T = 2 for m = 1, ceil(2 / 2) = 1
    assert B.eval_bound(degenerate) == 5
    with pytest.raises(DomainError):
        B.bound_positive_dim(1, 3, 2, 3, 2, 2)


def test_higher_order():
    assert B.eval_bound(B.bound_higher_order(1, 1, 2, 1, 2, 3)) == 6912
    for n, d, dv, dw in [(1, 1, 2, 3), (3, 2, 3, 2), (4, 4, 1, 2)]:
        assert B.eval_bound(B.bound_higher_order(1, n, 1, d, dv, dw)) == B.eval_bound(
            B.uniform_bound_first_order(1, n, d, dv, dw)
        )
    assert B.structurally_equal(
        B.fold(B.bound_higher_order(2, 1, 1, 1, 2, 2)), B.fold(B.uniform_bound_first_order(2, 1, 1, 2, 2))
    )


def test_higher_order_budget():
    with pytest.raises(BudgetExceeded):
        B.bound_higher_order(2, 1, 3, 1, 2, 2)


def test_generator_degrees():
    assert B.eval_bound(B.bound_generator_degrees(1, 1, 2, 1, 1)) == 256
    assert B.eval_bound(B.bound_generator_degrees(1, 2, 1, 3, 0)) == 1
    assert B.eval_bound(B.bound_generator_degrees(1, 2, 3, 0, 1)) == 6561
    with pytest.raises(DomainError):
        B.bound_generator_degrees(1, 1, 2, 0, 0)


def test_isogeny():
    assert B.eval_bound(B.isogeny_bound(1, 0)) == 1
    assert B.eval_bound(B.isogeny_bound(1, 1)) == 279936
    assert B.eval_bound(B.isogeny_bound(2, 1)) == 12**7


def test_eval_examples():
    assert B.eval_bound(B.lit(12)) == 12
    assert B.eval_bound(B.mul(B.power(2, 10), B.power(2, 10))) == 1048576
    assert B.eval_bound(B.power(2, B.power(2, 20)), Budget(eval_bits=2**16)) == B.Magnitude(1, 1048576.0)
    assert B.eval_bound(B.power(2, B.power(2, 20))) == 2 ** (2**20)


def test_quotient_must_divide():
    with pytest.raises(QuotientError):
        B.eval_bound(B.quot(7, 2))
    assert B.eval_bound(B.quot(8, 2)) == 4


@pytest.mark.parametrize("d", range(1, 5))
def test_m1_collapse(d):
    for ell in (1, 2, 3):
        for dv in (1, 2, 3):
            for dw in (1, 2, 3):
                got = B.eval_bound(B.bound_higher_order(1, 4, ell, d, dv, dw))
                assert got == dv ** (ell * 2 ** (d * ell)) * dw ** (2 ** (d * ell) - 1)


@given(st.integers(1, 4), st.integers(0, 4), st.integers(1, 3))
def test_degree_one_identity(n, d, ell):
    d = min(d, n)
    assert B.eval_bound(B.uniform_bound_first_order(1, n, d, 1, 1)) == 1
    assert B.eval_bound(B.bound_higher_order(1, n, ell, d, 1, 1)) == 1
    assert B.eval_bound(B.bound_generator_degrees(1, n, 1, 1, 1)) == 1


def test_monotone_on_small_grid():
    for d in range(1, 4):
        for ell in (1, 2):
            for dv in (1, 2, 3):
                for dw in (1, 2, 3):
                    here = B.eval_bound(B.bound_higher_order(1, 3, ell, d, dv, dw))
                    assert here <= B.eval_bound(B.bound_higher_order(1, 3, ell, d, dv + 1, dw))
                    assert here <= B.eval_bound(B.bound_higher_order(1, 3, ell, d, dv, dw + 1))
                    assert here <= B.eval_bound(B.bound_higher_order(1, 3, ell + 1, d, dv, dw))
                    if d < 3:
                        assert here <= B.eval_bound(B.bound_higher_order(1, 3, ell, d + 1, dv, dw))


def test_monotone_magnitudes_m2():
    low = B.eval_bound(B.uniform_bound_first_order(2, 1, 1, 2, 2))
    high = B.eval_bound(B.uniform_bound_first_order(2, 1, 1, 3, 2))
    assert (low.height, low.value) <= (high.height, high.value)


@pytest.mark.parametrize("m,n,d", [(1, 1, 1), (1, 3, 2), (1, 4, 4), (2, 1, 1)])
def test_trajectory_matches_first_order(m, n, d):
    assert B.trajectory_matches_first_order(m, n, d)


def test_json_round_trip():
    e = B.uniform_bound_first_order(2, 1, 1, 2, 2)
    again = B.from_json(B.to_json(e))
    assert B.structurally_equal(e, again)
    assert B.to_str(e) == B.to_str(again)


def test_magnitude_json():
    mag = B.Magnitude(1, 1048576.0)
    assert mag.to_json() == {"log_height": 1, "log_value": 1048576.0}


@given(st.integers(2, 60), st.integers(2, 60))
def test_magnitude_agrees_with_exact(a, b):
    e = B.power(a, B.power(b, 3))
    mag = B.magnitude(e)
    if mag.height == 0:
        assert math.isclose(mag.value, B.eval_bound(e), rel_tol=1e-9)
    else:
        assert math.isclose(mag.value, math.log2(a) * b**3, rel_tol=1e-6)
