from fractions import Fraction

import pytest

from app.algebra.polys import Poly, RatFunc
from app.algebra.series import HpgParams, hpg_series
from app.core.errors import InvalidParameterError, LogarithmicCaseError, ParityViolationError
from app.schemas.schemas import DihedralParams
from app.services.families import (
    CurveFunction,
    CurveTag,
    IsogenyMap,
    PqrTriple,
    cyclic_closed_form,
    cyclic_identity,
    cyclic_phi,
    dihedral_closed_form,
    dihedral_covering,
    dihedral_identity,
    dihedral_thetas,
    dihedral_variant,
    dihedral_variant_identity,
    gfdih_alternative,
    gfdih_covering,
    gfdih_expected_pattern,
    gfdih_generator,
    gfdih_normalization,
    gfdih_thetas,
    isogeny_covering,
    label_norm,
    pade_covering,
    pade_error,
    pade_identity,
    pade_pair,
    pqr_verify,
    verify_curve_morphism,
)
from app.services.ramification import analyze_covering, parse_pattern
from tests.conftest import poly, ratfunc


@pytest.mark.parametrize(
    "d, coeffs",
    [(1, (0, 1)), (2, (0, 2, -1)), (3, (0, 3, -3, 1))],
)
def test_cyclic_phi(Q, d, coeffs):
    assert cyclic_phi(d) == RatFunc.from_poly(poly(Q, *coeffs))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cyclic_identity_holds_symbolically(d):
    identity = cyclic_identity(d)
    assert identity.field.is_parameter
    assert identity.first_mismatch(8) is None
    assert identity.specialize(Fraction(2, 7)).first_mismatch(8) is None


def test_cyclic_closed_form(Q):
    a = Fraction(1, 3)
    closed = cyclic_closed_form(Q, a, 8)
    assert closed.agrees_with(hpg_series(HpgParams.of(Q, 1 + a, 1, 2), 8)) is None


def test_pade_pair(Q):
    first, second = pade_pair(2, 1, 1, 1)
    assert first * 4 == poly(Q, 4, -1)
    assert second * 4 == poly(Q, 4, -3)


def test_pade_covering(Q):
    cov = pade_covering(2, 1, 1, 1)
    assert cov.degree == 3
    assert cov.phi == ratfunc(Q, (0, 0, 0, 1), (16, -24, 9))
    assert str(analyze_covering(cov.phi).pattern) == "3=2+1=2+1"


def test_pade_approximation_order(Q):
    error = pade_error(pade_covering(2, 1, 1, 1), 6)
    assert [Q.to_fraction(c) for c in error.coeffs[:4]] == [0, 0, 0, Fraction(1, 32)]


@pytest.mark.parametrize("klmn", [(2, 1, 1, 1), (3, 1, 1, 0), (3, 2, 0, 1), (2, 3, 1, 1)])
def test_pade_identity(klmn):
    assert pade_identity(*klmn).first_mismatch(10) is None


def test_pade_logarithmic_case():
    with pytest.raises(LogarithmicCaseError):
        pade_covering(2, 2, 1, 1)


def test_dihedral_thetas(Q):
    assert dihedral_thetas(2) == (poly(Q, 1, 1), poly(Q, 2))
    assert dihedral_thetas(3) == (poly(Q, 1, 3), poly(Q, 3, 1))


def test_dihedral_covering_pattern():
    assert analyze_covering(dihedral_covering(3)).pattern == parse_pattern("1+2=3=1+2")


@pytest.mark.parametrize("d", [2, 3, 5])
def test_dihedral_identity(d):
    assert dihedral_identity(d).first_mismatch(8) is None


def test_dihedral_closed_form(Q):
    a = Fraction(1, 5)
    closed = dihedral_closed_form(Q, a, 3, 8)
    expected = hpg_series(HpgParams.of(Q, 3 * a / 2, (3 * a + 1) / 2, Fraction(1, 2)), 8)
    assert closed.agrees_with(expected) is None


def test_dihedral_variant(Q):
    assert dihedral_variant(3) == RatFunc.from_poly(poly(Q, 0, 9, -24, 16))
    assert dihedral_variant(2) == RatFunc.from_poly(poly(Q, 0, 4, -4))
    for d in (2, 3, 4):
        assert dihedral_variant_identity(d).first_mismatch(8) is None


def test_generalized_dihedral_smallest_case(Q):
    p = DihedralParams(k=2, l=1, m=0, n=1)
    assert gfdih_generator(p) == poly(Q, Fraction(1, 3), Fraction(-2, 3))
    assert gfdih_alternative(p) == poly(Q, Fraction(-1, 2), 1)
    assert Q.to_fraction(gfdih_normalization(p)) == Fraction(-2, 3)

    theta1, theta2 = gfdih_thetas(p)
    assert theta1 == poly(Q, Fraction(1, 9))
    assert theta2 == poly(Q, Fraction(-1, 3), Fraction(4, 9))

    phi = gfdih_covering(p)
    assert phi == RatFunc.from_poly(poly(Q, 0, 9, -24, 16))
    assert str(gfdih_expected_pattern(p)) == "2+1=2+1=3"
    assert analyze_covering(phi).pattern == gfdih_expected_pattern(p)


def test_dihedral_params_ranges():
    with pytest.raises(ValueError):
        DihedralParams(k=1, l=1, m=0, n=0)
    with pytest.raises(ValueError):
        DihedralParams(k=2, l=0, m=0, n=0)


def test_label_norms():
    assert label_norm("1+i") == 2
    assert label_norm("2") == 4
    assert label_norm("1+2*i") == 5
    assert label_norm("1-omega") == 3
    with pytest.raises(InvalidParameterError):
        label_norm("1/2")


def test_isogeny_coverings(Qi):
    i = Qi.generator()
    x = Poly.x(Qi)
    psi = RatFunc(poly(Qi, -1, 0, 1), x * (i * 2))
    covering = isogeny_covering(IsogenyMap(CurveTag.E1, psi, "1+i"))
    assert covering == ratfunc(Qi, (0, -4), (1, -2, 1))

    # multiplication by 2: (x^2 + 1)^2 / (4 (x^3 - x))
    doubling = RatFunc(poly(Qi, 1, 0, 1) ** 2, poly(Qi, 0, -4, 0, 4))
    covering = isogeny_covering(IsogenyMap(CurveTag.E1, doubling, "2"))
    assert covering == RatFunc(poly(Qi, 0, 16) * poly(Qi, -1, 1) ** 2, poly(Qi, 1, 1) ** 4)


def test_isogeny_degree_must_match_norm(Qi):
    psi = RatFunc(poly(Qi, -1, 0, 1), Poly.x(Qi) * (Qi.generator() * 2))
    with pytest.raises(ParityViolationError):
        isogeny_covering(IsogenyMap(CurveTag.E1, psi, "2"))


def test_curve_morphisms(Q, Qi):
    X, Y = CurveFunction.x(CurveTag.E1, Q), CurveFunction.y(CurveTag.E1, Q)
    assert verify_curve_morphism(CurveTag.E1, CurveTag.E1, X, Y)
    assert not verify_curve_morphism(CurveTag.E1, CurveTag.E1, X, Y * 2)

    # the automorphism (x, y) -> (-x, i y)
    Xi = CurveFunction.x(CurveTag.E1, Qi) * -1
    Yi = CurveFunction.y(CurveTag.E1, Qi) * RatFunc.constant(Qi, Qi.generator())
    assert verify_curve_morphism(CurveTag.E1, CurveTag.E1, Xi, Yi)


def test_pqr_identity(Q):
    one = poly(Q, 1)
    assert not pqr_verify(PqrTriple(one, one, one))
    with pytest.raises(InvalidParameterError):
        pqr_verify(PqrTriple(one, poly(Q, 0, 1), one))
