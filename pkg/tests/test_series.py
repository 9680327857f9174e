from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from app.algebra.fields import ExactField
from app.algebra.polys import RatFunc
from app.algebra.series import (
    HpgIdentity,
    HpgParams,
    LocalExpansion,
    RadicalFactor,
    TruncSeries,
    appell_terminating,
    exact_power,
    hpg_series,
    pochhammer,
    radical_series,
    series_arith,
    series_compose,
    series_pow,
)
from app.core.errors import InvalidParameterError, SeriesError

from tests.conftest import poly, ratfunc


def values(s: TruncSeries):
    return [s.field.to_fraction(c) for c in s.coeffs]


def test_hpg_series_coefficients(Q):
    s = hpg_series(HpgParams.of(Q, 1, 1, 2), 6)
    assert values(s) == [Fraction(1, k + 1) for k in range(6)]


def test_hpg_series_terminates(Q):
    s = hpg_series(HpgParams.of(Q, -2, 1, 1), 6)
    assert values(s) == [1, -2, 1, 0, 0, 0]


@pytest.mark.parametrize("c", [0, -1, -3])
def test_hpg_series_rejects_nonpositive_lower_parameter(Q, c):
    with pytest.raises(InvalidParameterError):
        hpg_series(HpgParams.of(Q, Fraction(1, 2), Fraction(1, 3), c), 5)


def test_hpg_series_over_parameter_field(Qa):
    a = Qa.generator()
    s = hpg_series(HpgParams(Qa, a, Qa.one, Qa.one), 4)
    # 2F1(a, 1; 1; x) = (1 - x)^(-a)
    assert s.coeffs[1] == a
    assert s.coeffs[2] == a * (a + 1) / 2


def test_arithmetic_and_division(Q):
    one_minus_x = TruncSeries.from_values(Q, [1, -1], 6)
    geometric = series_arith("div", TruncSeries.one(Q, 6), one_minus_x)
    assert values(geometric) == [1] * 6
    assert TruncSeries.from_ratfunc(ratfunc(Q, (1,), (1, -1)), 6).agrees_with(geometric) is None
    with pytest.raises(SeriesError):
        series_arith("div", geometric, TruncSeries.from_values(Q, [0, 1], 6))
    with pytest.raises(ValueError):
        series_arith("pow", geometric, geometric)


def test_truncation_is_the_smaller_order(Q):
    short = TruncSeries.from_values(Q, [1, 1], 3)
    long = TruncSeries.from_values(Q, [1, 1], 8)
    assert (short * long).n == 3


def test_agrees_with_reports_first_difference(Q):
    s = TruncSeries.from_values(Q, [1, 2, 3, 4])
    t = TruncSeries.from_values(Q, [1, 2, 5, 4])
    assert s.agrees_with(t) == 2
    assert s.agrees_with(s) is None


def test_series_power(Q):
    one_minus_x = TruncSeries.from_values(Q, [1, -1], 8)
    cube_root = series_pow(one_minus_x, Fraction(1, 3))
    assert (cube_root * cube_root * cube_root).agrees_with(one_minus_x) is None
    assert values(series_pow(one_minus_x, Fraction(1, 2)))[:3] == [1, Fraction(-1, 2), Fraction(-1, 8)]
    with pytest.raises(SeriesError):
        series_pow(TruncSeries.from_values(Q, [2, 1], 4), Fraction(1, 2))


def test_series_composition(Q):
    geometric = TruncSeries.from_values(Q, [1] * 6)
    assert series_compose(geometric, TruncSeries.from_values(Q, [0, 1], 6)).agrees_with(geometric) is None
    doubled = series_compose(geometric, TruncSeries.from_values(Q, [0, 2], 6))
    assert values(doubled) == [2 ** k for k in range(6)]
    squared = series_compose(geometric, TruncSeries.from_values(Q, [0, 0, 1], 6))
    assert values(squared) == [1, 0, 1, 0, 1, 0]
    with pytest.raises(SeriesError):
        series_compose(geometric, TruncSeries.from_values(Q, [1, 1], 6))


def test_puiseux_ramification(Q):
    s = TruncSeries.from_values(Q, [1, 1, 1], r=2)
    t = TruncSeries.from_values(Q, [1, 1], r=3)
    total = s + t
    assert total.r == 6
    assert total.coefficient(0) == Q.convert(2)


def test_exact_power(Q):
    assert exact_power(Q, Q.convert(4), Q.convert(Fraction(1, 2))) == Q.convert(2)
    assert exact_power(Q, Q.convert(8), Q.convert(Fraction(-1, 3))) == Q.convert(Fraction(1, 2))
    assert exact_power(Q, Q.convert(Fraction(9, 4)), Q.convert(Fraction(3, 2))) == Q.convert(Fraction(27, 8))
    with pytest.raises(SeriesError):
        exact_power(Q, Q.convert(2), Q.convert(Fraction(1, 2)))
    with pytest.raises(SeriesError):
        exact_power(Q, Q.convert(-4), Q.convert(Fraction(1, 2)))


def test_radical_series(Q):
    theta = RadicalFactor.of(Q, [(poly(Q, 4, -4), Fraction(1, 2))])
    assert values(radical_series(theta, 3)) == [2, -1, Fraction(-1, 4)]
    assert theta.log_derivative() == ratfunc(Q, (Fraction(1, 2),), (-1, 1))
    with pytest.raises(SeriesError):
        RadicalFactor.of(Q, [(poly(Q, 0, 1), Fraction(1, 2))])


def test_local_expansion(Q):
    f = LocalExpansion.from_ratfunc(ratfunc(Q, (0, 0, 1, -1)), 8)
    assert f.v == 2
    root = f.pow(Fraction(1, 2))
    assert root.v == 1
    assert values(root.series)[:3] == [1, Fraction(-1, 2), Fraction(-1, 8)]
    assert (root * root).first_difference(f, 6) is None
    pole = LocalExpansion.from_ratfunc(ratfunc(Q, (1,), (0, 1)), 4)
    assert pole.v == -1
    with pytest.raises(SeriesError):
        pole.as_series()


def test_pochhammer(Q):
    assert pochhammer(Q, Q.convert(Fraction(1, 2)), 3) == Q.convert(Fraction(15, 8))
    assert pochhammer(Q, Q.convert(-2), 3) == Q.zero
    assert pochhammer(Q, Q.convert(5), 0) == Q.one


def test_appell_rejects_unknown_kind(Q):
    with pytest.raises(ValueError):
        appell_terminating("F4", (1, 1, 1), (1, 1), 1, 1, Q.one, Q.one, Q)


def test_appell_terminating_sums(Q):
    # 1 - 1 - 1 + (1)_2 (-1)(-1)
    assert appell_terminating("F2", (1, -1, -1), (1, 1), 1, 1, Q.one, Q.one, Q) == Q.one
    assert appell_terminating("F3", (1, 1, 0, 0), (Fraction(1, 2),), 0, 0, Q.one, Q.one, Q) == Q.one


@pytest.mark.parametrize(
    "kind, numerators, denominators",
    [
        ("F2", (1, 1, 1), (1, 1)),
        ("F2", (1, -1, -2), (1, 1)),
        ("F3", (1, 1, Fraction(1, 2), -1), (2,)),
    ],
)
def test_appell_requires_termination(Q, kind, numerators, denominators):
    with pytest.raises(SeriesError) as info:
        appell_terminating(kind, numerators, denominators, 1, 1, Q.one, Q.one, Q)
    assert info.value.location == "non-terminating"


def test_quadratic_identity_and_its_companion(Q):
    a, b = Fraction(1, 3), Fraction(1, 5)
    c = (a + b + 1) / 2
    identity = HpgIdentity(
        HpgParams.of(Q, a, b, c),
        HpgParams.of(Q, a / 2, b / 2, c),
        RatFunc.from_poly(poly(Q, 0, 4, -4)),
        RadicalFactor.unit(Q),
    )
    assert identity.first_mismatch(12) is None
    companion = identity.companion()
    assert companion is not None
    assert companion.first_mismatch(10) is None


def test_broken_identity_is_detected(Q):
    identity = HpgIdentity(
        HpgParams.of(Q, Fraction(1, 3), Fraction(1, 5), Fraction(1, 2)),
        HpgParams.of(Q, Fraction(1, 6), Fraction(1, 10), Fraction(23, 30)),
        RatFunc.from_poly(poly(Q, 0, 4, -4)),
        RadicalFactor.unit(Q),
    )
    assert identity.first_mismatch(8) == 1


@given(
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=3, max_size=5),
    st.fractions(min_value=-3, max_value=3, max_denominator=5),
    st.fractions(min_value=-3, max_value=3, max_denominator=5),
)
def test_powers_compose(tail, e1, e2):
    Q = ExactField.rational()
    s = TruncSeries.from_values(Q, [1] + tail)
    assert series_pow(series_pow(s, e1), e2).agrees_with(series_pow(s, e1 * e2)) is None
