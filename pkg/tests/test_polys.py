from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from app.algebra.fields import ExactField, FieldElement
from app.algebra.polys import (
    INFINITY,
    Moebius,
    Poly,
    RatFunc,
    adjoin_root,
    compose_ratfunc,
    eliminate,
    factor_list,
    invert_mod,
    linear_roots,
    moebius_act,
    moebius_from_points,
    poly_arith,
    poly_gcd,
    resultant,
    squarefree_decompose,
)
from app.core.errors import DivisionByZeroError, FieldMismatchError, SingularMoebiusError

from tests.conftest import poly, ratfunc


coefficients = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polynomials = st.lists(coefficients, min_size=2, max_size=5).map(
    lambda values: Poly.from_values(ExactField.rational(), values)
)


def test_ring_operations(Q):
    one_plus_x, one_minus_x = poly(Q, 1, 1), poly(Q, 1, -1)
    assert poly_arith("mul", one_plus_x, one_minus_x) == poly(Q, 1, 0, -1)
    assert poly_arith("add", one_plus_x, one_minus_x) == poly(Q, 2)
    assert poly_arith("sub", one_plus_x, one_minus_x) == poly(Q, 0, 2)
    assert (one_plus_x ** 3).coeffs == tuple(Q.convert(c) for c in (1, 3, 3, 1))


def test_division_with_remainder(Q):
    q, r = poly(Q, 0, -1, 0, 1).divmod(poly(Q, -1, 1))
    assert q == poly(Q, 0, 1, 1)
    assert r.is_zero
    q, r = poly(Q, 1, 0, 1).divmod(poly(Q, 0, 2))
    assert q == poly(Q, 0, Fraction(1, 2))
    assert r == poly(Q, 1)
    with pytest.raises(DivisionByZeroError):
        poly(Q, 1, 1).divmod(Poly(Q))
    with pytest.raises(DivisionByZeroError):
        poly(Q, 1, 0, 1).exquo(poly(Q, 0, 1))


def test_gcd_is_monic(Q):
    assert poly_gcd(poly(Q, -1, 0, 1), poly(Q, 1, -2, 1)) == poly(Q, -1, 1)
    assert poly_gcd(poly(Q, 0, 0, 6), poly(Q, 0, 3)) == poly(Q, 0, 1)
    with pytest.raises(DivisionByZeroError):
        poly_gcd(Poly(Q), Poly(Q))


def test_squarefree_decomposition(Q):
    x = Poly.x(Q)
    p = x ** 3 * (x - 1) ** 2 * 5
    parts = sorted(squarefree_decompose(p), key=lambda part: part[1])
    assert parts == [(x - 1, 2), (x, 3)]


def test_factor_list_and_linear_roots(Q, Qi):
    roots = linear_roots(poly(Q, -1, 0, 1))
    assert sorted(Q.to_fraction(r) for r, _ in roots) == [-1, 1]
    assert linear_roots(poly(Q, 1, 0, 1)) == []
    assert [f.degree for f, _ in factor_list(poly(Q, 1, 0, 1))] == [2]

    i = FieldElement(Qi, Qi.generator())
    over_i = {FieldElement(Qi, r) for r, _ in linear_roots(poly(Qi, 1, 0, 1))}
    assert over_i == {i, -i}


def test_resultant(Q):
    assert resultant(poly(Q, 1, 0, 1), poly(Q, -1, 0, 1)) == 4
    assert resultant(poly(Q, -1, 1), poly(Q, -1, 0, 1)) == 0
    with pytest.raises(FieldMismatchError):
        resultant(poly(Q, 1, 1), poly(ExactField.parameter_field("a"), 1, 1))


def test_eliminate_parameter(Q, Qa):
    a = Qa.generator()
    p = Poly(Qa, (-a, Qa.zero, Qa.one))
    assert eliminate(p, poly(Qa, -1, 1)) == poly(Q, 1, -1)
    with pytest.raises(FieldMismatchError):
        eliminate(poly(Q, 1, 1), poly(Q, 2, 1))


def test_invert_mod(Q):
    modulus = poly(Q, 1, 0, 1)
    inverse = invert_mod(poly(Q, 1, 1), modulus)
    assert (inverse * poly(Q, 1, 1)) % modulus == poly(Q, 1)


def test_shift_compose_and_reverse(Q):
    p = poly(Q, 0, 0, 1)
    assert p.shift(1) == poly(Q, 1, 2, 1)
    assert p.compose(poly(Q, 1, 1)) == poly(Q, 1, 2, 1)
    assert poly(Q, 1, 2, 3).reverse() == poly(Q, 3, 2, 1)
    assert poly(Q, 0, 0, 4, 1).valuation() == 2


def test_show(Q, Qw):
    assert poly(Q, 1, 0, -1).show() == "-x^2+1"
    assert poly(Q, Fraction(1, 2), 3).show("z") == "3*z+1/2"
    assert Poly.x(Qw).scale(Qw.generator()).show() == "w*x"


def test_ratfunc_normal_form(Q):
    f = RatFunc(poly(Q, 0, 2), poly(Q, 0, 0, 2))
    assert f == RatFunc(poly(Q, 1), poly(Q, 0, 1))
    assert f.den.LC == Q.one
    assert RatFunc(Poly(Q), poly(Q, 3, 1)).den == poly(Q, 1)
    with pytest.raises(DivisionByZeroError):
        RatFunc(poly(Q, 1), Poly(Q))


def test_ratfunc_calculus(Q):
    f = ratfunc(Q, (0, 1), (-1, 1))
    assert f.derivative() == ratfunc(Q, (-1,), (1, -2, 1))
    assert Q.to_fraction(f(Q.convert(2))) == 2
    with pytest.raises(DivisionByZeroError):
        f(Q.convert(1))


def test_ratfunc_composition(Q):
    quadratic = ratfunc(Q, (0, 4, -4))
    twice = compose_ratfunc(quadratic, quadratic)
    assert twice.degree == 4
    assert twice == RatFunc.from_poly(poly(Q, 0, 16, -80, 128, -64))
    assert compose_ratfunc(ratfunc(Q, (0, 1), (-1, 1)), quadratic).degree == 2


def test_moebius_action(Q):
    m = Moebius.of(Q, 1, 0, 1, -1)
    f = ratfunc(Q, (0, 4, -4))
    assert moebius_act(m, f, "source") == ratfunc(Q, (0, -4), (1, -2, 1))
    assert moebius_act(m, f, "target") == ratfunc(Q, (0, -4, 4), (1, -4, 4))
    with pytest.raises(ValueError):
        moebius_act(m, f, "middle")


def test_moebius_group(Q):
    m = Moebius.of(Q, 2, 1, 1, 1)
    assert m.compose(m.inverse()).is_identity()
    assert m.apply(INFINITY) == Q.convert(2)
    assert Moebius.of(Q, 1, 0, 1, -1).apply(Q.convert(1)) is INFINITY
    with pytest.raises(SingularMoebiusError):
        Moebius.of(Q, 1, 2, 2, 4)


def test_moebius_from_points(Q):
    zero, one = Q.convert(0), Q.convert(1)
    m = moebius_from_points(Q, (zero, one, INFINITY), (one, zero, INFINITY))
    assert m.as_ratfunc() == ratfunc(Q, (1, -1))
    n = moebius_from_points(Q, (zero, one, INFINITY), (zero, one, INFINITY))
    assert n.is_identity()


def test_adjoin_root(Q):
    field = adjoin_root(poly(Q, 1, 1, 1))
    assert field.degree == 2
    assert field.name == "Q(s)"
    with pytest.raises(FieldMismatchError):
        adjoin_root(poly(field, 1, 1, 1))


@given(polynomials, polynomials)
def test_composition_multiplies_degrees(f, g):
    assume(f.degree >= 1 and g.degree >= 1)
    assert f.compose(g).degree == f.degree * g.degree


@given(polynomials)
def test_squarefree_parts_reassemble(p):
    assume(not p.is_zero)
    product = Poly.constant(p.field, 1)
    for f, k in squarefree_decompose(p):
        product = product * f ** k
    assert product * p.LC == p


@given(polynomials, polynomials)
def test_gcd_divides_both(p, q):
    assume(not (p.is_zero and q.is_zero))
    g = poly_gcd(p, q)
    assert (p % g).is_zero and (q % g).is_zero
