"""
Parametric families of pull-back coverings.

Cyclic coverings 1 - (1 - x)^d, Klein coverings built from Padé
approximants of (1 - x)^(l/k), dihedral theta polynomials and their
Appell-sum generalization, and coverings induced by isogenies of the
curves y^2 = x^3 - x, y^2 = x^3 - 1 and x^3 + y^3 = 1.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import I, Integer, Rational, conjugate, expand, sqrt
from sympy.parsing.sympy_parser import parse_expr

from app.algebra.fields import ExactField
from app.algebra.polys import Poly, RatFunc
from app.algebra.series import (
    HpgIdentity,
    HpgParams,
    RadicalFactor,
    TruncSeries,
    appell_terminating,
    series_pow,
)
from app.core.errors import (
    HypothesisViolationError,
    InvalidParameterError,
    LogarithmicCaseError,
    ParityViolationError,
)
from app.schemas.schemas import BranchingPattern, DihedralParams


logger = logging.getLogger(__name__)

PARAMETER = "a"


def _parameter_field() -> Tuple[ExactField, Any]:
    field = ExactField.parameter_field(PARAMETER)
    return field, field.generator()


def _check_positive(name: str, value: int, least: int = 1) -> None:
    if value < least:
        raise InvalidParameterError(f"{name} must be at least {least}, got {value}")


def terminating_hpg(field: ExactField, a, b, c, degree: int) -> Poly:
    """
    The polynomial 2F1(a, b; c; x) cut after x^degree.

    Used when a = -degree, where the lower parameter may itself be a
    negative integer below -degree.
    """
    a, b, c = field.convert(a), field.convert(b), field.convert(c)
    coeffs = [field.one]
    term = field.one
    for k in range(degree):
        den = (c + k) * (k + 1)
        if not den:
            raise InvalidParameterError(
                f"lower parameter {field.show(c)} vanishes before degree {degree}",
                location="forbidden-lower-parameter",
            )
        term = term * (a + k) * (b + k) / den
        coeffs.append(term)
    return Poly(field, tuple(coeffs))


# Cyclic coverings
def cyclic_phi(d: int, field: Optional[ExactField] = None) -> RatFunc:
    """1 - (1 - x)^d."""
    _check_positive("d", d)
    field = field or ExactField.rational()
    one_minus_x = Poly.from_values(field, [1, -1])
    return RatFunc.from_poly(Poly.constant(field, 1) - one_minus_x ** d)


def cyclic_identity(d: int) -> HpgIdentity:
    """
    2F1(1 + d a, 1; 2; x) = (phi_{d-1}(x)/d) 2F1(1 + a, 1; 2; 1 - (1 - x)^d)
    over Q(a), where phi = x phi_{d-1}.
    """
    field, a = _parameter_field()
    phi = cyclic_phi(d, field)
    cofactor = phi.num.exquo(Poly.x(field))
    theta = RadicalFactor(field, ((cofactor, field.one),), field.one / field.convert(d))
    return HpgIdentity(
        HpgParams(field, field.one + a * d, field.one, field.convert(2)),
        HpgParams(field, field.one + a, field.one, field.convert(2)),
        phi,
        theta,
    )


def cyclic_closed_form(field: ExactField, a, order: int) -> TruncSeries:
    """((1 - x)^(-a) - 1)/(a x), the closed form of 2F1(1 + a, 1; 2; x)."""
    one_minus_x = TruncSeries.from_values(field, [1, -1], order + 1)
    power = series_pow(one_minus_x, -field.convert(a))
    shifted = power.coeffs[1:]
    return TruncSeries(field, tuple(c / field.convert(a) for c in shifted), 1)


# Padé coverings
@dataclass(frozen=True, eq=False)
class PadeCovering:
    """
    first/second approximate (1 - x)^(-l/k) to order m + n, and
    1 - phi = (1 - x)^l first^k / second^k.
    """

    k: int
    l: int
    m: int
    n: int
    first: Poly
    second: Poly
    phi: RatFunc

    @property
    def degree(self) -> int:
        return self.phi.degree


def _pade_preconditions(k: int, l: int, m: int, n: int) -> None:
    _check_positive("k", k, 2)
    _check_positive("l", l)
    _check_positive("m", m, 0)
    _check_positive("n", n, 0)
    if l % k == 0 and Fraction(l, k) <= m:
        raise LogarithmicCaseError(
            f"l/k = {Fraction(l, k)} is an integer not exceeding m = {m}; the terminating pair is logarithmic"
        )


def pade_pair(k: int, l: int, m: int, n: int) -> Tuple[Poly, Poly]:
    """
    The terminating pair 2F1(-n, a - m; -m - n; x) and
    2F1(-m, -a - n; -m - n; x) with a = l/k.
    """
    _pade_preconditions(k, l, m, n)
    field = ExactField.rational()
    a = Fraction(l, k)
    c = -m - n
    first = terminating_hpg(field, -n, a - m, c, n)
    second = terminating_hpg(field, -m, -a - n, c, m)
    return first, second


def pade_covering(k: int, l: int, m: int, n: int) -> PadeCovering:
    """
    Klein's covering from the Padé approximant of degree (m, n).

    Raises:
        LogarithmicCaseError: l/k is an integer and l/k <= m
    """
    first, second = pade_pair(k, l, m, n)
    field = first.field
    one_minus_x = Poly.from_values(field, [1, -1])
    image = RatFunc(one_minus_x ** l * first ** k, second ** k)
    phi = RatFunc.constant(field, 1) - image
    logger.debug("Padé covering (%d, %d, %d, %d) has degree %d", k, l, m, n, phi.degree)
    return PadeCovering(k, l, m, n, first, second, phi)


def pade_identity(k: int, l: int, m: int, n: int) -> HpgIdentity:
    """
    2F1(m + 1 - l/k, n + 1; m + n + 2; x)
        = theta 2F1(1 - 1/k, 1; 2; phi(x)),
    with phi numerator x^(m+n+1) N(x) and theta = N/N(0) second^(1-k).
    """
    cov = pade_covering(k, l, m, n)
    field = cov.first.field
    num = cov.second ** k - Poly.from_values(field, [1, -1]) ** l * cov.first ** k
    v = num.valuation()
    if v != m + n + 1:
        raise HypothesisViolationError(f"covering vanishes to order {v} at x = 0, expected {m + n + 1}")
    cofactor = Poly(field, num.coeffs[v:])
    theta = RadicalFactor(
        field,
        ((cofactor, field.one), (cov.second, field.convert(1 - k))),
        field.one / cofactor(0),
    )
    a = Fraction(l, k)
    return HpgIdentity(
        HpgParams.of(field, m + 1 - a, n + 1, m + n + 2),
        HpgParams.of(field, 1 - Fraction(1, k), 1, 2),
        cov.phi,
        theta,
    )


def pade_error(cov: PadeCovering, order: int) -> TruncSeries:
    """Series of second/first - (1 - x)^(l/k) through ``order`` coefficients."""
    field = cov.first.field
    ratio = TruncSeries.from_ratfunc(RatFunc(cov.second, cov.first), order)
    target = series_pow(TruncSeries.from_values(field, [1, -1], order), Fraction(cov.l, cov.k))
    return ratio - target


# Dihedral coverings
def dihedral_thetas(d: int) -> Tuple[Poly, Poly]:
    """(1 + sqrt(x))^d = theta1(x) + theta2(x) sqrt(x)."""
    _check_positive("d", d)
    field = ExactField.rational()
    theta1 = Poly.from_values(field, [comb(d, 2 * k) for k in range(d // 2 + 1)])
    theta2 = Poly.from_values(field, [comb(d, 2 * k + 1) for k in range((d - 1) // 2 + 1)])
    return theta1, theta2


def dihedral_covering(d: int) -> RatFunc:
    theta1, theta2 = dihedral_thetas(d)
    return RatFunc(Poly.x(theta1.field) * theta2 ** 2, theta1 ** 2)


def dihedral_identity(d: int) -> HpgIdentity:
    """
    2F1(d a/2, (d a + 1)/2; 1/2; x) = theta1^(-a) 2F1(a/2, (a + 1)/2; 1/2; x theta2^2/theta1^2)
    over Q(a).
    """
    field, a = _parameter_field()
    theta1, theta2 = dihedral_thetas(d)
    theta1, theta2 = (p.map_coeffs(field.convert, field) for p in (theta1, theta2))
    phi = RatFunc(Poly.x(field) * theta2 ** 2, theta1 ** 2)
    half = field.convert(Fraction(1, 2))
    return HpgIdentity(
        HpgParams(field, a * d * half, (a * d + 1) * half, half),
        HpgParams(field, a * half, (a + 1) * half, half),
        phi,
        RadicalFactor(field, ((theta1, -a),)),
    )


def dihedral_closed_form(field: ExactField, a, d: int, order: int) -> TruncSeries:
    """((1 + sqrt(x))^(-d a) + (1 - sqrt(x))^(-d a))/2 as a series in x."""
    e = -field.convert(a) * d
    coeffs = []
    binom = field.one
    for j in range(2 * order):
        if j % 2 == 0:
            coeffs.append(binom)
        binom = binom * (e - j) / field.convert(j + 1)
    return TruncSeries(field, tuple(coeffs), 1)


def dihedral_variant(d: int) -> RatFunc:
    """
    d^2 x 2F1((1-d)/2, (1+d)/2; 3/2; x)^2 for odd d and
    d^2 x (1 - x) 2F1(1 - d/2, 1 + d/2; 3/2; x)^2 for even d.
    """
    _check_positive("d", d)
    field = ExactField.rational()
    x = Poly.x(field)
    if d % 2:
        p = terminating_hpg(field, Fraction(1 - d, 2), Fraction(1 + d, 2), Fraction(3, 2), (d - 1) // 2)
        return RatFunc.from_poly(x * p ** 2 * (d * d))
    p = terminating_hpg(field, 1 - Fraction(d, 2), 1 + Fraction(d, 2), Fraction(3, 2), d // 2 - 1)
    return RatFunc.from_poly(x * (Poly.constant(field, 1) - x) * p ** 2 * (d * d))


def dihedral_variant_identity(d: int) -> HpgIdentity:
    """2F1(d a/2, -d a/2; 1/2; x) = 2F1(a/2, -a/2; 1/2; psi(x)) over Q(a)."""
    field, a = _parameter_field()
    half = field.convert(Fraction(1, 2))
    psi = dihedral_variant(d).map_coeffs(field.convert, field)
    return HpgIdentity(
        HpgParams(field, a * d * half, -a * d * half, half),
        HpgParams(field, a * half, -a * half, half),
        psi,
        RadicalFactor.unit(field),
    )


# Generalized dihedral coverings
def _check_dihedral(p: DihedralParams) -> None:
    if p.l % p.k == 0:
        raise HypothesisViolationError(f"l/k = {p.l // p.k} is an integer")
    if gcd(p.k, p.l) != 1:
        logger.warning("gcd(k, l) = %d; the covering may factor through a dihedral one", gcd(p.k, p.l))


def _s_poly(f: RatFunc, what: str) -> Poly:
    if f.den.degree > 0:
        raise HypothesisViolationError(f"{what} is not a polynomial in sqrt(x): {f.show('s')}")
    return f.num


def gfdih_generator(p: DihedralParams) -> Poly:
    """
    G(s) = s^m F3(m+1, n+1; -m, -n; 1 + l/k; (s+1)/(2s), (1+s)/2) as a
    polynomial in s = sqrt(x).
    """
    _check_dihedral(p)
    field = ExactField.rational()
    s = RatFunc.x(field)
    arg1 = (s + 1) / (s * 2)
    arg2 = (s + 1) / 2
    total = appell_terminating(
        "F3",
        (p.m + 1, p.n + 1, -p.m, -p.n),
        (1 + Fraction(p.l, p.k),),
        p.m,
        p.n,
        arg1,
        arg2,
        field,
    )
    return _s_poly(total * s ** p.m, "F3 generator")


def gfdih_alternative(p: DihedralParams) -> Poly:
    """(1+s)^(m+n) F2(-l/k-m-n; -m, -n; -2m, -2n; 2s/(1+s), 2/(1+s))."""
    field = ExactField.rational()
    s = RatFunc.x(field)
    total = appell_terminating(
        "F2",
        (-Fraction(p.l, p.k) - p.m - p.n, -p.m, -p.n),
        (-2 * p.m, -2 * p.n),
        p.m,
        p.n,
        s * 2 / (s + 1),
        RatFunc.constant(field, 2) / (s + 1),
        field,
    )
    return _s_poly(total * (s + 1) ** (p.m + p.n), "F2 generator")


def gfdih_normalization(p: DihedralParams):
    """The constant G_F3/G_F2 relating the two Appell forms of the generator."""
    ratio = RatFunc(gfdih_generator(p), gfdih_alternative(p))
    if not ratio.is_constant:
        raise HypothesisViolationError(f"Appell forms are not proportional: {ratio.show('s')}")
    return ratio.num.coeff(0)


def gfdih_thetas(p: DihedralParams) -> Tuple[Poly, Poly]:
    """
    (Theta1, Theta2) with (1 + s)^l G^k = Theta1(x) + x^(m + 1/2) Theta2(x).

    Raises:
        HypothesisViolationError: l/k is an integer, or an odd power below
            x^(m + 1/2) survives
    """
    g = gfdih_generator(p)
    field = g.field
    h = Poly.from_values(field, [1, 1]) ** p.l * g ** p.k
    even = [h.coeff(2 * j) for j in range(h.degree // 2 + 1)]
    odd = [h.coeff(2 * j + 1) for j in range((h.degree + 1) // 2)]
    if any(odd[: p.m]):
        raise HypothesisViolationError(f"odd powers below x^({p.m} + 1/2) do not vanish for {p}")
    return Poly(field, tuple(even)), Poly(field, tuple(odd[p.m:]))


def gfdih_covering(p: DihedralParams) -> RatFunc:
    """x^(2m+1) Theta2^2 / Theta1^2, of degree (m + n) k + l."""
    theta1, theta2 = gfdih_thetas(p)
    field = theta1.field
    phi = RatFunc(Poly.x(field) ** (2 * p.m + 1) * theta2 ** 2, theta1 ** 2)
    expected = (p.m + p.n) * p.k + p.l
    if phi.degree != expected:
        raise HypothesisViolationError(f"covering has degree {phi.degree}, expected {expected}")
    return phi


def gfdih_expected_pattern(p: DihedralParams) -> BranchingPattern:
    """
    Fibers over 0, 1 and infinity of x^(2m+1) Theta2^2/Theta1^2, a covering
    of the (1/2, 1/k, 1/2) equation: orders 2m+1 and 2n+1 above the 1/2
    points (both above 0 when the degree is even), l and m+n copies of k
    above 1.
    """
    d = (p.m + p.n) * p.k + p.l
    odd = [2 * p.m + 1, 2 * p.n + 1]
    if d % 2:
        over_zero, over_inf = [odd[0]], [odd[1]]
    else:
        over_zero, over_inf = odd, []
    over_zero += [2] * ((d - sum(over_zero)) // 2)
    over_inf += [2] * ((d - sum(over_inf)) // 2)
    return BranchingPattern.of(over_zero, [p.l] + [p.k] * (p.m + p.n), over_inf)


# Elliptic curves
class CurveTag(str, Enum):
    """The three curves with extra automorphisms."""

    E1 = "E1"
    E2 = "E2"
    E3 = "E3"


# y^power = relation(x)
_CURVE_RELATIONS: Dict[CurveTag, Tuple[int, Tuple[int, ...]]] = {
    CurveTag.E1: (2, (0, -1, 0, 1)),
    CurveTag.E2: (2, (-1, 0, 0, 1)),
    CurveTag.E3: (3, (1, 0, 0, -1)),
}

_LABEL_SYMBOLS = {"i": I, "omega": Rational(-1, 2) + sqrt(3) * I / 2, "w": Rational(-1, 2) + sqrt(3) * I / 2}


def label_norm(label: str) -> int:
    """Norm of an element of Z[i] or Z[omega] written like ``1+2*i``, ``2`` or ``1+3*omega``."""
    expr = parse_expr(label, local_dict=dict(_LABEL_SYMBOLS))
    norm = expand(expr * conjugate(expr))
    if not isinstance(norm, Integer):
        raise InvalidParameterError(f"label {label!r} is not an algebraic integer of Z[i] or Z[omega]")
    return int(norm)


@dataclass(frozen=True, eq=False)
class IsogenyMap:
    """x-coordinate map psi of an endomorphism of E1 or E2."""

    curve: CurveTag
    psi: RatFunc
    label: str

    @property
    def norm(self) -> int:
        return label_norm(self.label)


def _residue_class(p: Poly, step: int, what: str) -> Poly:
    bad = [j for j, c in enumerate(p.coeffs) if c and j % step]
    if bad:
        raise ParityViolationError(f"{what} has x^{bad[0]} outside exponents divisible by {step}")
    return Poly(p.field, tuple(p.coeffs[::step]))


def isogeny_covering(iso: IsogenyMap) -> RatFunc:
    """
    z -> psi(1/sqrt(z))^(-2) on E1, z -> psi(z^(-1/3))^(-3) on E2.

    Raises:
        ParityViolationError: the substituted map is not a function of z,
            or its degree is not the norm of the label
    """
    steps = {CurveTag.E1: 2, CurveTag.E2: 3}
    if iso.curve not in steps:
        raise InvalidParameterError(f"isogeny coverings are defined on E1 and E2, not {iso.curve.value}")
    step = steps[iso.curve]
    field = iso.psi.field
    s = RatFunc.x(field)
    image = iso.psi.compose(RatFunc.constant(field, 1) / s) ** (-step)
    num = _residue_class(image.num, step, "numerator")
    den = _residue_class(image.den, step, "denominator")
    covering = RatFunc(num, den)
    if covering.degree != iso.norm:
        raise ParityViolationError(
            f"covering degree {covering.degree} differs from the norm {iso.norm} of {iso.label}"
        )
    return covering


@dataclass(frozen=True, eq=False)
class CurveFunction:
    """
    c0(x) + c1(x) y + ... reduced modulo the curve equation, with fewer
    terms than the y-degree of the relation.
    """

    curve: CurveTag
    coeffs: Tuple[RatFunc, ...]

    @property
    def field(self) -> ExactField:
        return self.coeffs[0].field

    @classmethod
    def of(cls, curve: CurveTag, coeffs: Sequence[RatFunc]) -> "CurveFunction":
        power, _ = _CURVE_RELATIONS[curve]
        field = coeffs[0].field
        padded = list(coeffs) + [RatFunc.constant(field, 0)] * power
        return cls(curve, tuple(padded[:power])) if len(coeffs) <= power else cls._reduce(curve, list(coeffs))

    @classmethod
    def constant(cls, curve: CurveTag, field: ExactField, value) -> "CurveFunction":
        return cls.of(curve, [RatFunc.constant(field, value)])

    @classmethod
    def x(cls, curve: CurveTag, field: ExactField) -> "CurveFunction":
        return cls.of(curve, [RatFunc.x(field)])

    @classmethod
    def y(cls, curve: CurveTag, field: ExactField) -> "CurveFunction":
        return cls.of(curve, [RatFunc.constant(field, 0), RatFunc.constant(field, 1)])

    @classmethod
    def _reduce(cls, curve: CurveTag, coeffs: List[RatFunc]) -> "CurveFunction":
        power, relation = _CURVE_RELATIONS[curve]
        field = coeffs[0].field
        rel = RatFunc.from_poly(Poly.from_values(field, relation))
        for j in range(len(coeffs) - 1, power - 1, -1):
            c = coeffs[j]
            if not c.is_zero:
                coeffs[j - power] = coeffs[j - power] + c * rel
            coeffs[j] = RatFunc.constant(field, 0)
        return cls(curve, tuple(coeffs[:power]))

    def _lift(self, other) -> "CurveFunction":
        if isinstance(other, CurveFunction):
            if other.curve != self.curve:
                raise InvalidParameterError(f"{other.curve.value} function used on {self.curve.value}")
            return other
        if isinstance(other, RatFunc):
            return CurveFunction.of(self.curve, [other])
        return CurveFunction.constant(self.curve, self.field, other)

    def __add__(self, other) -> "CurveFunction":
        o = self._lift(other)
        return CurveFunction(self.curve, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "CurveFunction":
        return CurveFunction(self.curve, tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "CurveFunction":
        return self + (-self._lift(other))

    def __mul__(self, other) -> "CurveFunction":
        o = self._lift(other)
        zero = RatFunc.constant(self.field, 0)
        product = [zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(o.coeffs):
                if not b.is_zero:
                    product[i + j] = product[i + j] + a * b
        return CurveFunction._reduce(self.curve, product)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CurveFunction":
        result = CurveFunction.constant(self.curve, self.field, 1)
        for _ in range(k):
            result = result * self
        return result

    def substitute_x(self, f: RatFunc) -> "CurveFunction":
        """Compose every coefficient with f; y is left unchanged."""
        return CurveFunction(self.curve, tuple(c.compose(f) for c in self.coeffs))

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def show(self) -> str:
        parts = []
        for j, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            monom = "" if j == 0 else ("*y" if j == 1 else f"*y^{j}")
            parts.append(f"({c.show()}){monom}")
        return " + ".join(parts) or "0"


def curve_equation(target: CurveTag, X: CurveFunction, Y: CurveFunction) -> CurveFunction:
    """The target curve's defining polynomial evaluated at (X, Y)."""
    if target == CurveTag.E1:
        return Y ** 2 - X ** 3 + X
    if target == CurveTag.E2:
        return Y ** 2 - X ** 3 + 1
    return X ** 3 + Y ** 3 - 1


def verify_curve_morphism(source: CurveTag, target: CurveTag, X: CurveFunction, Y: CurveFunction) -> bool:
    """True when (X, Y) maps the source curve into the target curve."""
    if X.curve != source or Y.curve != source:
        raise InvalidParameterError(f"coordinates must be functions on {source.value}")
    return curve_equation(target, X, Y).is_zero


@dataclass(frozen=True, eq=False)
class PqrTriple:
    """Polynomials with R^2 = (z - 1) Q^3 - z^2 P^6."""

    P: Poly
    Q: Poly
    R: Poly

    @property
    def n(self) -> int:
        return self.P.degree


def _check_pqr_degrees(t: PqrTriple) -> None:
    n = t.n
    if n < 0 or t.Q.degree > 2 * n or t.R.degree > 3 * n + 1:
        raise InvalidParameterError(
            f"degrees ({t.P.degree}, {t.Q.degree}, {t.R.degree}) exceed the pattern (n, 2n, 3n+1)"
        )


def pqr_verify(t: PqrTriple) -> bool:
    """Exact check of R^2 = (z - 1) Q^3 - z^2 P^6."""
    _check_pqr_degrees(t)
    field = t.P.field
    z = Poly.x(field)
    return t.R ** 2 == (z - 1) * t.Q ** 3 - z ** 2 * t.P ** 6


def pqr_to_morphism(t: PqrTriple) -> Tuple[CurveFunction, CurveFunction]:
    """
    The map E3 -> E2 given by X = x y Q(x^-3)/P(x^-3)^2,
    Y = x^3 R(x^-3)/P(x^-3)^3.
    """
    _check_pqr_degrees(t)
    field = t.P.field
    x = RatFunc.x(field)
    inv_cube = RatFunc.constant(field, 1) / x ** 3
    P, Q, R = (RatFunc.from_poly(p).compose(inv_cube) for p in (t.P, t.Q, t.R))
    X = CurveFunction.y(CurveTag.E3, field) * (x * Q / P ** 2)
    Y = CurveFunction.of(CurveTag.E3, [x ** 3 * R / P ** 3])
    return X, Y
