from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffbound.diffpoly import (
    DiffPolynomial,
    base,
    const,
    derive_formal,
    derive_multi,
    evaluate_point,
    jet,
    param,
    parse_poly,
    parse_system,
    state,
)
from diffbound.errors import DomainError, ParseError


def polys(m):
    atoms = st.one_of(
        st.builds(lambda j, a, b: state(j, (a, b)[:m], m), st.integers(1, 2), st.integers(0, 2), st.integers(0, 2)),
        st.builds(lambda j: param(j, None, m), st.integers(1, 2)),
        st.builds(lambda k: base(k, m), st.integers(1, m)),
        st.builds(lambda c: const(Fraction(c, 2), m), st.integers(-4, 4)),
    )
    monomial = st.lists(atoms, min_size=1, max_size=3).map(lambda fs: _product(fs, m))
    return st.lists(monomial, min_size=1, max_size=4).map(lambda ms: sum(ms[1:], ms[0]))


def _product(factors, m):
    out = const(1, m)
    for f in factors:
        out = out * f
    return out


P1 = polys(1)
P2 = polys(2)


@given(P2, P2, P2)
def test_ring_laws(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f - f).is_zero()


@given(P2, P2, st.integers(1, 2))
def test_derivation_is_additive_and_leibniz(f, g, k):
    assert derive_formal(f + g, k) == derive_formal(f, k) + derive_formal(g, k)
    assert derive_formal(f * g, k) == derive_formal(f, k) * g + f * derive_formal(g, k)


@given(P2)
def test_derivations_commute(f):
    assert derive_formal(derive_formal(f, 1), 2) == derive_formal(derive_formal(f, 2), 1)
    assert derive_multi(f, (1, 1)) == derive_formal(derive_formal(f, 1), 2)


@given(P2)
def test_print_parse_round_trip(f):
    assert parse_poly(str(f), m=2) == f


@given(P2)
def test_degree_of_product(f):
    if not f.is_zero():
        assert (f * f).degree() == 2 * f.degree()


def _poly_in_t(m):
    atoms = st.one_of(st.builds(lambda k: base(k, m), st.integers(1, m)), st.builds(lambda c: const(c, m), st.integers(-3, 3)))
    mono = st.lists(atoms, min_size=1, max_size=3).map(lambda fs: _product(fs, m))
    return st.lists(mono, min_size=1, max_size=3).map(lambda ms: sum(ms[1:], ms[0]))


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(1, 2), st.integers(-3, 3)), min_size=1, max_size=4), _poly_in_t(1), _poly_in_t(1))
def test_evaluation_commutes_with_derivation(terms, p1, p2):
    f = const(0, 1)
    for e, j, c in terms:
        f = f + const(c, 1) * state(j, (0,), 1) ** e
    point = {1: p1, 2: p2}
    lhs = derive_formal(evaluate_point(f, point), 1)
    df = derive_formal(f, 1)
    values = {1: p1, 2: p2}
    derived = {1: derive_formal(p1, 1), 2: derive_formal(p2, 1)}
    from diffbound.diffpoly import substitute
    from diffbound.diffpoly.ring import STATE, Var

    mapping = {Var(STATE, j, (0,)): values[j] for j in (1, 2)}
    mapping.update({Var(STATE, j, (1,)): derived[j] for j in (1, 2)})
    assert lhs == substitute(df, mapping)


def test_derivative_examples():
    x = state(1, (0,), 1)
    t = base(1, 1)
    assert str(derive_formal(x**2, 1)) == "2*x1*x1_[1]"
    assert str(derive_formal(t * x, 1)) == "t1*x1_[1] + x1"
    assert derive_formal(t**3, 1) == 3 * t**2
    assert derive_formal(const(5, 1), 1).is_zero()


def test_derivative_of_point():
    f = parse_poly("x1_[1]", m=1)
    assert str(evaluate_point(f, {1: parse_poly("t1^2", m=1)})) == "2*t1"


def test_jet_variables_are_not_derivable():
    with pytest.raises(DomainError):
        derive_formal(jet(1, (1,), 1), 1)


def test_printing():
    f = parse_poly("x1^4 - 2*a1*x1 + a1_[1,0]", m=2)
    assert str(f) == "x1^4 - 2*a1*x1 + a1_[1,0]"
    assert str(parse_poly("1/2*x1 - 3", m=1)) == "1/2*x1 - 3"
    assert str(const(0, 1)) == "0"
    assert str(parse_poly("-(x1 + 1)^2", m=1)) == "-x1^2 - 2*x1 - 1"


def test_monic():
    f = parse_poly("3*x1^2 + 6", m=1)
    assert str(f.monic()) == "x1^2 + 2"


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("x1 +", "expected"),
        ("x1_[1,0]", "tag"),
        ("t1_[1]", "t"),
        ("y1", ""),
        ("x1 ^ -1", ""),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_poly(text, m=1)
    assert fragment in str(info.value)
    assert info.value.line >= 1 and info.value.column >= 1


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_system("d1 x1 = x1\nd2 x1 = x1 * * 2\n")
    assert info.value.line == 2


def test_system_must_be_total():
    with pytest.raises(DomainError):
        parse_system("d1 x1 = x1\n", m=2)


def test_system_rejects_positive_order():
    with pytest.raises(DomainError):
        parse_system("d1 x1 = x1_[1]\n")


def test_system_parsing():
    sys_ = parse_system("# comment\nd1 x1 = x1^2\nd2 x1 = x1^3 + a1\n")
    assert (sys_.m, sys_.n) == (2, 1)
    assert str(sys_.g(2, 1)) == "x1^3 + a1"
