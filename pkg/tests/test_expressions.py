from fractions import Fraction

import pytest

from app.algebra.expressions import FormulaEvaluator, parse_formula, split_top_level
from app.algebra.polys import Poly
from app.core.errors import PatternParseError, SeriesError

from tests.conftest import poly, ratfunc


def test_split_top_level():
    assert split_top_level("a/2, (a+b+1)/2, f(1,2)") == ["a/2", "(a+b+1)/2", "f(1,2)"]
    assert split_top_level("b=1/3; c=2", ";") == ["b=1/3", "c=2"]
    assert split_top_level("") == []


def test_parse_formula_uses_caret_for_powers():
    assert str(parse_formula("x^2")) == "x**2"


@pytest.mark.parametrize("text", ["1.5*x", "x + y", "(x", "x +* 2"])
def test_parse_formula_rejects(text):
    with pytest.raises(PatternParseError):
        parse_formula(text)


def test_unknown_symbol_position():
    with pytest.raises(PatternParseError) as info:
        parse_formula("x + yy")
    assert info.value.position == 4
    assert info.value.exit_status == 2


def test_ratfunc_over_q(Q):
    ev = FormulaEvaluator.for_field(Q)
    assert ev.ratfunc("4*x*(1-x)") == ratfunc(Q, (0, 4, -4))
    assert ev.ratfunc("x^2/(2-x)^2") == ratfunc(Q, (0, 0, 1), (4, -4, 1))
    with pytest.raises(PatternParseError):
        ev.ratfunc("sqrt(1-x)")


def test_constants_over_number_field(Qw):
    ev = FormulaEvaluator.for_field(Qw)
    assert not ev.constant("w^2+w+1")
    assert ev.constant("1/w") == ev.constant("w^2")
    assert ev.ratfunc("w*x").num == Poly.x(Qw).scale(Qw.generator())


def test_constants_list_and_extra_names(Q):
    ev = FormulaEvaluator.for_field(Q, b=Fraction(1, 3))
    values = ev.constants_list("b/2, 1-b, 2")
    assert [Q.to_fraction(v) for v in values] == [Fraction(1, 6), Fraction(2, 3), 2]


def test_parameter_field_formulas(Qa):
    ev = FormulaEvaluator.for_field(Qa)
    value = ev.constant("(a+1)/2")
    assert Qa.specialize(value, Fraction(1)) == 1


def test_radical_factor_constant(Q):
    ev = FormulaEvaluator.for_field(Q)
    theta = ev.radical_factor("(4-4*x)^(1/2)")
    assert Q.to_fraction(theta.constant) == 2
    assert [(p, Q.to_fraction(e)) for p, e in theta.factors] == [(poly(Q, 1, -1), Fraction(1, 2))]
    assert Q.to_fraction(ev.radical_factor("(4-4*x)^(1/2)", normalized=True).constant) == 1
    with pytest.raises(SeriesError):
        ev.radical_factor("(2-x)^(1/2)")
    with pytest.raises(SeriesError):
        ev.radical_factor("x^(1/2)")


def test_radical_factor_cancels_rational_parts(Q):
    ev = FormulaEvaluator.for_field(Q)
    theta = ev.radical_factor("(1-(1-x)^3)/(3*x)")
    assert Q.to_fraction(theta.constant) == 1
    assert [(p, Q.to_fraction(e)) for p, e in theta.factors] == [(poly(Q, 1, -1, Fraction(1, 3)), 1)]

    # x and x^2 - x both vanish at 0, their quotient does not
    theta = ev.radical_factor("x*(1-x)^(1/2)/(x^2-x)")
    assert Q.to_fraction(theta.constant) == -1
    assert sorted((Q.to_fraction(e), p == poly(Q, 1, -1)) for p, e in theta.factors) == [
        (Fraction(-1), True),
        (Fraction(1, 2), True),
    ]

    theta = ev.radical_factor("x*(x-2)/x*(1-x)^(1/2)")
    assert Q.to_fraction(theta.constant) == -2
    assert sorted((Q.to_fraction(e), p) for p, e in theta.factors) == [
        (Fraction(1, 2), poly(Q, 1, -1)),
        (Fraction(1), poly(Q, 1, Fraction(-1, 2))),
    ]


def test_radical_factor_with_denominator(Q):
    theta = FormulaEvaluator.for_field(Q).radical_factor("((1-x)/(1+x))^(1/3)")
    exponents = sorted(Q.to_fraction(e) for _, e in theta.factors)
    assert exponents == [Fraction(-1, 3), Fraction(1, 3)]


def test_expansion_with_declared_radical(Q):
    ev = FormulaEvaluator.for_field(Q, precision=6)
    ev.bind_radical("s", "(1-x)^(1/2)")
    product = ev.expansion("s*s")
    assert product.first_difference(ev.expansion("1-x"), 5) is None
    assert "s" in ev.names
