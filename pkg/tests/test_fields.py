from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from app.algebra.fields import (
    ExactField,
    FieldElement,
    embed_rational,
    field_arith,
    parameter_element,
    specialize_parameter,
)
from app.core.errors import DivisionByZeroError, FieldMismatchError, PoleAtSampleError
from app.schemas.schemas import NumberFieldSpec


rationals = st.fractions(min_value=-100, max_value=100, max_denominator=60)


def generator(field: ExactField) -> FieldElement:
    return FieldElement(field, field.generator())


def test_rational_field_is_shared():
    assert ExactField.rational() is ExactField.rational()
    assert ExactField.rational().name == "Q"


def test_eisenstein_generator_is_a_cube_root_of_unity(Qw):
    w = generator(Qw)
    assert w ** 3 == 1
    assert w ** 2 + w + 1 == 0
    assert str(w) == "w"
    assert str(w ** 2) == "-1-w"


def test_inverse_in_number_field(Qw):
    w = generator(Qw)
    u = w + 1
    assert u.inverse() * u == 1
    assert field_arith("inv", u) == u ** -1


def test_field_arith_by_name(Qi):
    i = generator(Qi)
    assert field_arith("mul", i, i) == -1
    assert field_arith("pow", i, 4) == 1
    assert field_arith("sub", i, i) == 0
    assert field_arith("eq", i, i)
    with pytest.raises(ValueError):
        field_arith("sqrt", i)


def test_division_by_zero(Q):
    one, zero = embed_rational(1, Q), embed_rational(0, Q)
    with pytest.raises(DivisionByZeroError):
        field_arith("div", one, zero)
    with pytest.raises(DivisionByZeroError):
        zero.inverse()


def test_mixing_fields_is_rejected(Qw, Qi):
    with pytest.raises(FieldMismatchError):
        generator(Qw) + generator(Qi)
    with pytest.raises(FieldMismatchError):
        field_arith("add", generator(Qw), generator(Qi))
    assert generator(Qw) != generator(Qi)


def test_reducible_minimal_polynomial_is_rejected():
    spec = NumberFieldSpec(generator="t", minpoly=(Fraction(-1), Fraction(0), Fraction(1)))
    with pytest.raises(FieldMismatchError):
        ExactField.from_spec(spec)


def test_degree_one_spec_collapses_to_q():
    spec = NumberFieldSpec(generator="t", minpoly=(Fraction(-3), Fraction(1)))
    assert ExactField.from_spec(spec).is_rational


def test_non_monic_spec_is_invalid():
    with pytest.raises(ValueError):
        NumberFieldSpec(generator="t", minpoly=(Fraction(1), Fraction(2)))


def test_specialize_parameter(Qa):
    a = parameter_element(Qa)
    f = (a + 1) / (a - 1)
    assert specialize_parameter(f, 3) == 2
    assert specialize_parameter(f, Fraction(1, 2)) == -3
    with pytest.raises(PoleAtSampleError):
        specialize_parameter(f, 1)


def test_specialize_needs_a_parameter(Q):
    with pytest.raises(FieldMismatchError):
        specialize_parameter(embed_rational(2, Q), 1)


def test_rational_values_in_extensions(Qw, Qa):
    assert Qw.to_fraction(Qw.convert(Fraction(5, 3))) == Fraction(5, 3)
    assert not Qw.is_rational_value(Qw.generator())
    with pytest.raises(FieldMismatchError):
        Qw.to_fraction(Qw.generator())
    assert Qa.is_integer_value(Qa.convert(-4))
    assert not Qa.is_rational_value(Qa.generator())


def test_q_has_no_generator(Q):
    with pytest.raises(FieldMismatchError):
        Q.generator()


@given(rationals, rationals, rationals)
def test_field_axioms_over_q(x, y, z):
    Q = ExactField.rational()
    a, b, c = (embed_rational(v, Q) for v in (x, y, z))
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    if x:
        assert a * a.inverse() == 1


@given(rationals, rationals)
def test_field_axioms_over_eisenstein(x, y):
    Qw = ExactField.from_spec(NumberFieldSpec(generator="w", minpoly=(Fraction(1), Fraction(1), Fraction(1))))
    u = generator(Qw) * x + y
    v = generator(Qw) * y - x
    assert u * v == v * u
    assert (u + v) * u == u * u + v * u
    if u:
        assert (v / u) * u == v
