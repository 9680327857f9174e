from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from app.core.errors import ConstantMapError, InvalidParameterError, PatternParseError
from app.schemas.schemas import AffineForm, BranchingPattern, ExponentTriple
from app.services.ramification import (
    analyze_covering,
    degree_formula_check,
    format_pattern,
    hurwitz_part_count,
    klein_degree,
    parse_pattern,
    pattern_notation,
    singular_values,
    transform_exponents,
)
from tests.conftest import ratfunc


def test_quadratic_map_is_belyi(Q):
    report = analyze_covering(ratfunc(Q, (0, 4, -4)))
    assert str(report.pattern) == "1+1=2=2"
    assert report.is_belyi
    assert report.hurwitz_defect == 0
    assert hurwitz_part_count(report.pattern)


def test_extra_critical_point_is_reported(Q):
    # x^2 + 2x: x^2 + 2x - 1 is squarefree, critical point x = -1 maps to -1
    report = analyze_covering(ratfunc(Q, (0, 2, 1)))
    assert str(report.pattern) == "1+1=1+1=2"
    assert report.hurwitz_defect == 1
    assert [(p.locus, p.points, p.multiplicity) for p in report.outside] == [("x+1", 1, 2)]
    assert not report.is_belyi


def test_rational_covering_with_poles(Q):
    # x^3 / (3x - 4)^2
    report = analyze_covering(ratfunc(Q, (0, 0, 0, 1), (16, -24, 9)))
    assert str(report.pattern) == "3=2+1=2+1"
    assert report.is_belyi


def test_constant_map_rejected(Q):
    with pytest.raises(ConstantMapError):
        analyze_covering(ratfunc(Q, (3,)))


def test_parse_pattern_sorts_parts():
    pattern = parse_pattern("1+2=3=1+2")
    assert str(pattern) == "2+1=3=2+1"
    assert pattern.degree == 3
    assert pattern == BranchingPattern.of((1, 2), (3,), (2, 1))


def test_parse_template_pattern():
    pattern = parse_pattern("2n*2=n*4=(n-1)*4+2+1+1", n=2)
    assert pattern.degree == 8
    assert pattern.fibers == ((2, 2, 2, 2), (4, 4), (4, 2, 1, 1))


def test_template_needs_n():
    with pytest.raises(PatternParseError):
        parse_pattern("2n*2=n*4=(n-1)*4+2+1+1")


def test_parse_errors_carry_position():
    with pytest.raises(PatternParseError) as info:
        parse_pattern("2+x=3=3")
    assert info.value.location == "position 2"
    assert info.value.exit_status == 2

    with pytest.raises(PatternParseError):
        parse_pattern("2+1=3=2")
    with pytest.raises(PatternParseError):
        parse_pattern("2+1=3")


def test_pattern_notation_goes_both_ways():
    pattern = pattern_notation("2+2=3+1=2+2")
    assert pattern_notation(pattern) == "2+2=3+1=2+2"
    assert format_pattern(pattern) == str(pattern)


def test_transform_exponents_of_quadratic():
    below = ExponentTriple.parse("(p,1/2,q)")
    values = transform_exponents(parse_pattern("1+1=2=2"), below)
    p, q = AffineForm(v=Fraction(1)), AffineForm(w=Fraction(1))
    assert values == [p, p, AffineForm(u=Fraction(1)), q.scale(2)]
    assert singular_values(values) == [p, p, q.scale(2)]


def test_degree_formula():
    below = ExponentTriple.parse("(p,1/2,q)")
    above = ExponentTriple.parse("(p,p,2q)")
    assert degree_formula_check(below, above, 2)
    assert not degree_formula_check(below, above, 3)


@pytest.mark.parametrize(
    "k, above, expected",
    [
        (3, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 3)), 1),
        (5, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)), 1),
        (4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)), 1),
    ],
)
def test_klein_degree(k, above, expected):
    assert klein_degree(k, ExponentTriple.of(*above)) == expected


def test_klein_degree_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        klein_degree(6, ExponentTriple.of(Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)))
    with pytest.raises(InvalidParameterError):
        klein_degree(3, ExponentTriple.parse("(1/2,1/3,p)"))


@given(st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=4))
def test_printed_patterns_parse_back(parts):
    d = sum(parts)
    pattern = BranchingPattern.of(parts, [d], [1] * d)
    assert parse_pattern(str(pattern)) == pattern
