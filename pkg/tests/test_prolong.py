import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffbound.acceptance import random_generator_set
from diffbound.budget import Budget
from diffbound.diffpoly import parse_poly, parse_system
from diffbound.errors import BudgetExceeded, DomainError
from diffbound.multiindex import alpha
from diffbound.prolong import (
    evaluate_on_nabla,
    integrability_conditions,
    nabla_point,
    prolong_epsilon,
    prolong_substitution,
    reduce_modulo_system,
)


def _eqs(out):
    return [str(e.poly) for e in out.equations]


def test_square_examples():
    f = [parse_poly("x1^2", m=1)]
    assert _eqs(prolong_substitution(f, 1)) == ["x1^2", "2*x1*x1_[1]"]
    assert _eqs(prolong_epsilon(f, 1)) == ["x1^2", "2*x1*x1_[1]"]


def test_coefficient_derivation():
    f = [parse_poly("t1*x1", m=1)]
    assert _eqs(prolong_substitution(f, 1)) == ["t1*x1", "t1*x1_[1] + x1"]
    assert _eqs(prolong_epsilon(f, 1)) == ["t1*x1", "t1*x1_[1] + x1"]


def test_output_shape():
    out = prolong_substitution([parse_poly("x1*x2 - t1", m=2)], 2)
    assert len(out.equations) == alpha(2, 2)
    assert len(out.coords) == 2 * alpha(2, 2)
    data = out.to_json()
    assert data["ell"] == 2 and data["coords"][:2] == ["x1", "x2"]
    assert data["equations"][1]["xi"] == [1, 0]


@given(st.integers(0, 10**6))
def test_methods_agree(seed):
    gens, ell = random_generator_set(random.Random(seed))
    a = prolong_substitution(gens, ell)
    b = prolong_epsilon(gens, ell)
    assert a.to_json() == b.to_json()


def test_epsilon_term_guard():
    f = [parse_poly("(x1 + x2 + t1)^6", m=2)]
    with pytest.raises(BudgetExceeded) as info:
        prolong_epsilon(f, 3, budget=Budget(terms=50))
    assert info.value.kind == "terms"


def test_generator_validation():
    with pytest.raises(DomainError):
        prolong_substitution([], 1)
    with pytest.raises(DomainError):
        prolong_substitution([parse_poly("a1*x1", m=1)], 1)
    with pytest.raises(DomainError):
        prolong_substitution([parse_poly("x1_[1]", m=1)], 1)
    with pytest.raises(DomainError):
        prolong_substitution([parse_poly("x1", m=1)], -1)


def test_nabla_examples():
    t = parse_poly("t1", m=1)
    assert [str(v) for v in nabla_point({1: parse_poly("t1^2", m=1)}, 2)] == ["t1^2", "2*t1", "2"]
    assert [str(v) for v in nabla_point({1: t, 2: t * t}, 1)] == ["t1", "t1^2", "1", "2*t1"]


def test_nabla_rejects_gaps():
    with pytest.raises(DomainError):
        nabla_point({2: parse_poly("t1", m=1)}, 1)


@pytest.mark.parametrize("ell", range(4))
def test_prolongation_vanishes_on_curve(ell):
    gens = [parse_poly("x2 - x1^2", m=1), parse_poly("x3 - x1^3", m=1)]
    pt = {1: parse_poly("t1", m=1), 2: parse_poly("t1^2", m=1), 3: parse_poly("t1^3", m=1)}
    for eq in prolong_substitution(gens, ell).equations:
        assert evaluate_on_nabla(eq.poly, pt, ell).is_zero()


def test_prolongation_detects_off_curve_point():
    gens = [parse_poly("x2 - x1^2", m=1)]
    pt = {1: parse_poly("t1", m=1), 2: parse_poly("t1^2 + t1", m=1)}
    values = [evaluate_on_nabla(eq.poly, pt, 1) for eq in prolong_substitution(gens, 1).equations]
    assert not all(v.is_zero() for v in values)


def test_integrability_examples():
    cubic = parse_system("d1 x1 = x1^2\nd2 x1 = x1^3 + a1\n")
    assert [str(c) for c in integrability_conditions(cubic)] == ["x1^4 - 2*a1*x1 + a1_[1,0]"]
    params = parse_system("d1 x1 = a1\nd2 x1 = a2\n", m=2)
    assert [str(c) for c in integrability_conditions(params)] == ["a2_[1,0] - a1_[0,1]"]
    symmetric = parse_system("d1 x1 = x1\nd2 x1 = x1\n")
    assert integrability_conditions(symmetric) == []


def test_single_derivation_has_no_conditions():
    assert integrability_conditions(parse_system("d1 x1 = x1^2 + t1\n")) == []


def test_reduction():
    system = parse_system("d1 x1 = x1^2\n")
    assert str(reduce_modulo_system(parse_poly("x1_[2]", m=1), system)) == "2*x1^3"


def test_reduction_strategies_agree_when_integrable():
    system = parse_system("d1 x1 = x1\nd2 x1 = x1\n")
    f = parse_poly("x1_[1,2] + x1_[2,1]", m=2)
    assert reduce_modulo_system(f, system, "smallest") == reduce_modulo_system(f, system, "largest")


def test_reduction_strategies_differ_by_integrability_condition():
    system = parse_system("d1 x1 = x1^2\nd2 x1 = x1^3 + a1\n")
    f = parse_poly("x1_[1,1]", m=2)
    gap = reduce_modulo_system(f, system, "largest") - reduce_modulo_system(f, system, "smallest")
    [cond] = integrability_conditions(system)
    assert gap.monic() == cond or (-gap).monic() == cond
