"""
Second-order Fuchsian equations and their pull-backs.

An equation p2*y'' + p1*y' + p0*y = 0 is transformed by z -> phi(x) and by
the gauge Y = theta*y. Local exponents come from indicial equations; at
points with integer exponent difference the Frobenius recurrence decides
whether a logarithm appears. Recognition moves three relevant points to
0, 1, infinity and reads off the hypergeometric parameters.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from app.algebra.fields import ExactField, FieldElement
from app.algebra.polys import (
    INFINITY,
    Moebius,
    Poly,
    RatFunc,
    adjoin_root,
    factor_list,
    invert_mod,
    linear_roots,
    moebius_from_points,
    poly_gcd,
)
from app.algebra.series import HpgParams, RadicalFactor, TruncSeries, exact_power
from app.core.config import settings
from app.core.errors import (
    ConstantMapError,
    HypothesisViolationError,
    InvalidParameterError,
    IrrationalIndicialRootsError,
    IrregularSingularPointError,
    RecognitionError,
    SeriesError,
)


logger = logging.getLogger(__name__)


def _lcm(p: Poly, q: Poly) -> Poly:
    return (p * q) // poly_gcd(p, q)


@dataclass(frozen=True, eq=False)
class LinearODE2:
    """p2*y'' + p1*y' + p0*y = 0 with polynomial coefficients and monic p2."""

    p0: RatFunc
    p1: RatFunc
    p2: RatFunc

    def __post_init__(self):
        if self.p2.is_zero:
            raise InvalidParameterError("leading coefficient of a second-order equation is zero")
        field = self.p2.field
        for c in (self.p0, self.p1):
            field.check_same(c.field)
        denominator = self.p2.den
        for c in (self.p0, self.p1):
            denominator = _lcm(denominator, c.den)
        polys = [c.num * (denominator // c.den) for c in (self.p0, self.p1, self.p2)]
        content = polys[2]
        for p in polys[:2]:
            if not p.is_zero:
                content = poly_gcd(content, p)
        scale = field.one / polys[2].LC
        cleared = [RatFunc.from_poly((p // content) * scale) for p in polys]
        object.__setattr__(self, "p0", cleared[0])
        object.__setattr__(self, "p1", cleared[1])
        object.__setattr__(self, "p2", cleared[2])

    @classmethod
    def of(cls, p0, p1, p2) -> "LinearODE2":
        def lift(c):
            return RatFunc.from_poly(c) if isinstance(c, Poly) else c

        return cls(lift(p0), lift(p1), lift(p2))

    @property
    def field(self) -> ExactField:
        return self.p2.field

    def normalized(self) -> Tuple[RatFunc, RatFunc]:
        """(P, Q) of the monic form y'' + P*y' + Q*y = 0."""
        return self.p1 / self.p2, self.p0 / self.p2

    def apply(self, y: RatFunc) -> RatFunc:
        """The operator applied to a rational function."""
        dy = y.derivative()
        return self.p2 * dy.derivative() + self.p1 * dy + self.p0 * y

    def specialize(self, sample) -> "LinearODE2":
        return LinearODE2(self.p0.specialize(sample), self.p1.specialize(sample), self.p2.specialize(sample))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearODE2):
            return NotImplemented
        if other.field != self.field:
            return False
        return self.normalized() == other.normalized()

    def __hash__(self) -> int:
        return hash((self.field, self.p2.degree))

    def show(self, var: str = "x") -> str:
        return f"({self.p2.show(var)})*y'' + ({self.p1.show(var)})*y' + ({self.p0.show(var)})*y"

    def __repr__(self) -> str:
        return f"LinearODE2({self.show()})"


def hpg_operator(p: HpgParams) -> LinearODE2:
    """z(1-z)y'' + (c-(a+b+1)z)y' - ab*y."""
    field = p.field
    one = field.one
    return LinearODE2.of(
        Poly(field, (-(p.a * p.b),)),
        Poly(field, (p.c, -(p.a + p.b + one))),
        Poly(field, (field.zero, one, -one)),
    )


def gauge_transform(ode: LinearODE2, ell: RatFunc) -> LinearODE2:
    """Equation for Y = theta*y where theta'/theta = ell."""
    p0, p1, p2 = ode.p0, ode.p1, ode.p2
    return LinearODE2(
        p2 * (ell * ell - ell.derivative()) - ell * p1 + p0,
        p1 - ell * p2 * 2,
        p2,
    )


def pullback_ode(ode: LinearODE2, phi: RatFunc, theta: Optional[RadicalFactor] = None) -> LinearODE2:
    """
    The equation satisfied by theta(x)*y(phi(x)) when y solves ``ode``.

    Raises:
        ConstantMapError: phi is constant
    """
    if phi.is_constant:
        raise ConstantMapError(f"{phi.show()} is constant")
    ode.field.check_same(phi.field)
    d1 = phi.derivative()
    d2 = d1.derivative()
    q2 = ode.p2.compose(phi)
    q1 = ode.p1.compose(phi) * d1 - q2 * d2 / d1
    q0 = ode.p0.compose(phi) * d1 * d1
    result = LinearODE2(q0, q1, q2)
    if theta is not None and theta.factors:
        ode.field.check_same(theta.field)
        result = gauge_transform(result, theta.log_derivative())
    return result


# Local analysis
def _raw(field: ExactField, point):
    if point is INFINITY:
        return INFINITY
    if isinstance(point, FieldElement):
        field.check_same(point.field)
        return point.value
    return field.convert(point)


def _local_coefficients(ode: LinearODE2, point) -> Tuple[RatFunc, RatFunc]:
    """(P, Q) in a local coordinate t vanishing at ``point``."""
    field = ode.field
    P, Q = ode.normalized()
    if point is INFINITY:
        t = RatFunc.x(field)
        inv = RatFunc(Poly.constant(field, 1), Poly.x(field))
        return t ** -1 * 2 - P.compose(inv) * t ** -2, Q.compose(inv) * t ** -4
    shift = RatFunc.from_poly(Poly(field, (point, field.one)))
    return P.compose(shift), Q.compose(shift)


def _order(f: RatFunc) -> Optional[int]:
    """Valuation at t = 0, None for the zero function."""
    if f.is_zero:
        return None
    return f.num.valuation() - f.den.valuation()


def _head(f: RatFunc, pole: int, location: str):
    """Coefficient of t^(-pole) in f; the pole order may not exceed ``pole``."""
    v = _order(f)
    field = f.field
    if v is None or v > -pole:
        return field.zero
    if v < -pole:
        raise IrregularSingularPointError(f"pole of order {-v} in the normalized equation", location=location)
    return f.num.coeff(f.num.valuation()) / f.den.coeff(f.den.valuation())


def _square_root(field: ExactField, value) -> Optional[Any]:
    if not value:
        return field.zero
    if field.is_rational:
        try:
            return exact_power(field, value, field.convert(Fraction(1, 2)))
        except SeriesError:
            return None
    if field.is_algebraic:
        roots = linear_roots(Poly(field, (-value, field.zero, field.one)))
        return roots[0][0] if roots else None
    numer = _polynomial_root(value.numer)
    denom = _polynomial_root(value.denom)
    if numer is None or denom is None:
        return None
    return value.field(numer) / value.field(denom)


def _polynomial_root(p):
    coeff, factors = p.factor_list()
    rational = ExactField.rational()
    try:
        root = p.ring(exact_power(rational, rational.convert(coeff), rational.convert(Fraction(1, 2))))
    except SeriesError:
        return None
    for f, k in factors:
        if k % 2:
            return None
        root = root * f ** (k // 2)
    return root


def _order_exponents(field: ExactField, e1, e2) -> Tuple[Any, Any]:
    """Exponent 0 first; otherwise increasing when the difference is rational."""
    if not e2 or (e1 and field.is_rational_value(e1 - e2) and field.to_fraction(e1 - e2) > 0):
        return e2, e1
    return e1, e2


def _indicial_roots(field: ExactField, p0, q0, location: str) -> Tuple[Any, Any]:
    # lambda^2 + (p0 - 1)*lambda + q0
    b = p0 - field.one
    disc = b * b - q0 * 4
    root = _square_root(field, disc)
    if root is None:
        raise IrrationalIndicialRootsError(
            f"indicial discriminant {field.show(disc)} is not a square in {field.name}", location=location
        )
    half = field.one / 2
    return _order_exponents(field, (-b + root) * half, (-b - root) * half)


def _label(field: ExactField, point) -> str:
    return "infinity" if point is INFINITY else f"x={field.show(point)}"


def indicial_exponents(ode: LinearODE2, point) -> Tuple[FieldElement, FieldElement]:
    """
    Local exponents at a point of the coefficient field or at infinity.

    Raises:
        IrregularSingularPointError: the point is not regular singular
        IrrationalIndicialRootsError: the exponents are not in the field
    """
    field = ode.field
    point = _raw(field, point)
    e1, e2 = _raw_exponents(ode, point)
    return FieldElement(field, e1), FieldElement(field, e2)


def _raw_exponents(ode: LinearODE2, point) -> Tuple[Any, Any]:
    field = ode.field
    location = _label(field, point)
    P, Q = _local_coefficients(ode, point)
    return _indicial_roots(field, _head(P, 1, location), _head(Q, 2, location), location)


def _is_regular(ode: LinearODE2, point) -> bool:
    P, Q = _local_coefficients(ode, point)
    return all(v is None or v >= 0 for v in (_order(P), _order(Q)))


def _integer_gap(field: ExactField, low, high) -> Optional[int]:
    gap = high - low
    if not field.is_integer_value(gap):
        return None
    return int(field.to_fraction(gap))


def _frobenius_obstruction(ode: LinearODE2, point, low, m: int):
    """Right-hand side of the recurrence at step m, starting from exponent ``low``."""
    field = ode.field
    P, Q = _local_coefficients(ode, point)
    t = RatFunc.x(field)
    p = TruncSeries.from_ratfunc(P * t, m + 1).coeffs
    q = TruncSeries.from_ratfunc(Q * t * t, m + 1).coeffs
    one = field.one

    def indicial(lam):
        return lam * (lam - one) + p[0] * lam + q[0]

    c = [one]
    for k in range(1, m + 1):
        rhs = field.zero
        for j in range(1, k + 1):
            rhs = rhs + ((low + field.convert(k - j)) * p[j] + q[j]) * c[k - j]
        if k == m:
            return rhs
        c.append(-rhs / indicial(low + field.convert(k)))
    return field.zero


def _logarithmic(ode: LinearODE2, point, exponents: Tuple[Any, Any]) -> bool:
    field = ode.field
    e1, e2 = exponents
    gap = _integer_gap(field, e1, e2)
    if gap is None:
        return False
    low = e1 if gap >= 0 else e2
    m = abs(gap)
    if m == 0:
        return True
    if m > settings.HPG_FROBENIUS_LIMIT:
        raise HypothesisViolationError(
            f"exponent difference {m} exceeds the Frobenius limit {settings.HPG_FROBENIUS_LIMIT}",
            location=_label(field, point),
        )
    return bool(_frobenius_obstruction(ode, point, low, m))


def is_logarithmic(ode: LinearODE2, point) -> bool:
    """
    Whether the local solutions at ``point`` involve a logarithm.

    Only an integer exponent difference can produce one; a zero difference
    always does.
    """
    point = _raw(ode.field, point)
    return _logarithmic(ode, point, _raw_exponents(ode, point))


# Classification
class PointKind(str, Enum):
    NONSINGULAR = "nonsingular"
    IRRELEVANT = "irrelevant"
    APPARENT = "apparent"
    LOGARITHMIC = "logarithmic"
    RELEVANT = "relevant-nonlog"


@dataclass(frozen=True)
class SingularPointData:
    """
    Local data at a point. ``location`` is a raw field value or INFINITY;
    a conjugate block of points is recorded by its irreducible polynomial
    in ``block`` with ``location`` left as None.
    """

    field: ExactField
    location: Any
    exponents: Tuple[Any, Any]
    difference: Any
    kind: PointKind
    block: Optional[Poly] = None

    @property
    def is_infinity(self) -> bool:
        return self.block is None and self.location is INFINITY

    @property
    def is_relevant(self) -> bool:
        return self.kind not in (PointKind.NONSINGULAR, PointKind.IRRELEVANT)

    def at(self, point) -> bool:
        if self.block is not None:
            return False
        if point is INFINITY or self.location is INFINITY:
            return point is self.location
        return not (self.location - point)

    def show_location(self) -> str:
        if self.block is not None:
            return f"roots of {self.block.show()}"
        return "infinity" if self.location is INFINITY else self.field.show(self.location)

    def show_exponents(self) -> str:
        return ", ".join(self.field.show(e) for e in self.exponents)


def _difference(field: ExactField, exponents: Tuple[Any, Any]):
    diff = exponents[1] - exponents[0]
    if field.is_rational_value(diff) and field.to_fraction(diff) < 0:
        return -diff
    return diff


def _kind(field: ExactField, exponents: Tuple[Any, Any], logarithmic: bool) -> PointKind:
    if logarithmic:
        return PointKind.LOGARITHMIC
    gap = _integer_gap(field, *exponents)
    if gap is not None and abs(gap) == 1:
        return PointKind.IRRELEVANT
    if gap is not None and field.is_integer_value(exponents[0]):
        return PointKind.APPARENT
    return PointKind.RELEVANT


def _point_data(ode: LinearODE2, point) -> SingularPointData:
    field = ode.field
    exponents = _raw_exponents(ode, point)
    if _is_regular(ode, point):
        kind = PointKind.NONSINGULAR
    else:
        kind = _kind(field, exponents, _logarithmic(ode, point, exponents))
    return SingularPointData(field, point, exponents, _difference(field, exponents), kind)


def _multiplicity(f: Poly, p: Poly) -> Tuple[int, Poly]:
    k = 0
    while p.degree >= f.degree:
        q, r = p.divmod(f)
        if not r.is_zero:
            break
        p, k = q, k + 1
    return k, p


def _residue(f: Poly, c: RatFunc, pole: int, location: str):
    """Leading coefficient of c at the roots of f, as a constant of the field."""
    field = f.field
    if c.is_zero:
        return field.zero
    k, rest = _multiplicity(f, c.den)
    if k > pole:
        raise IrregularSingularPointError(f"pole of order {k} in the normalized equation", location=location)
    if k < pole:
        return field.zero
    value = (c.num * invert_mod(rest, f)) % f
    if value.degree > 0:
        raise IrrationalIndicialRootsError("local exponents differ across conjugate points", location=location)
    return value.coeff(0)


def _block_data(ode: LinearODE2, f: Poly) -> SingularPointData:
    field = ode.field
    location = f"roots of {f.show()}"
    P, Q = ode.normalized()
    exponents = _indicial_roots(field, _residue(f, P, 1, location), _residue(f, Q, 2, location), location)
    gap = _integer_gap(field, *exponents)
    logarithmic = False
    if gap is not None:
        if gap == 0:
            logarithmic = True
        elif not field.is_rational:
            raise IrrationalIndicialRootsError(
                f"logarithm test at a conjugate block needs an extension of {field.name}", location=location
            )
        else:
            extended = adjoin_root(f)
            lifted = _lift(ode, extended)
            point = extended.generator()
            low = extended.convert(field.to_fraction(exponents[0]))
            high = extended.convert(field.to_fraction(exponents[1]))
            logarithmic = _logarithmic(lifted, point, (low, high))
    kind = _kind(field, exponents, logarithmic)
    return SingularPointData(field, None, exponents, _difference(field, exponents), kind, block=f)


def _lift(ode: LinearODE2, extended: ExactField) -> LinearODE2:
    field = ode.field

    def convert(c):
        return extended.convert(field.to_fraction(c))

    return LinearODE2(*(c.map_coeffs(convert, extended) for c in (ode.p0, ode.p1, ode.p2)))


def classify_singularities(ode: LinearODE2) -> List[SingularPointData]:
    """
    Singular points of the equation with their exponents and kind.

    Finite points in the field come first, then conjugate blocks, then
    infinity when it is singular.
    """
    P, Q = ode.normalized()
    points: List[SingularPointData] = []
    blocks: List[SingularPointData] = []
    denominator = P.den * Q.den
    if denominator.degree > 0:
        for f, _ in factor_list(denominator):
            if f.degree == 1:
                points.append(_point_data(ode, -f.coeff(0)))
            else:
                blocks.append(_block_data(ode, f))
    at_infinity = _point_data(ode, INFINITY)
    result = points + blocks
    if at_infinity.kind is not PointKind.NONSINGULAR:
        result.append(at_infinity)
    logger.debug("classified %d singular points", len(result))
    return result


# Recognition
def _slots(field: ExactField, relevant: List[SingularPointData]) -> Optional[List[Any]]:
    canonical = [field.zero, field.one, INFINITY]
    slots: List[Any] = [None, None, None]
    filled = [False, False, False]
    pending = []
    for point in relevant:
        if point.block is not None:
            logger.info("relevant points at %s are not in %s", point.show_location(), field.name)
            return None
        for i, target in enumerate(canonical):
            if point.at(target):
                slots[i], filled[i] = point.location, True
                break
        else:
            pending.append(point.location)
    for i in range(3):
        if not filled[i]:
            slots[i] = pending.pop(0) if pending else canonical[i]
            filled[i] = True
    return slots


def recognize_hypergeometric(ode: LinearODE2) -> Optional[Tuple[Moebius, HpgParams]]:
    """
    A Moebius map moving the relevant singularities to 0, 1, infinity and the
    hypergeometric parameters of the equation in the new coordinate, after
    irrelevant singularities are removed by a gauge factor.

    Returns None when the relevant points do not lie in the coefficient
    field or the normalized equation is not hypergeometric.

    Raises:
        RecognitionError: more than three relevant singular points
    """
    field = ode.field
    relevant = [p for p in classify_singularities(ode) if p.is_relevant]
    if len(relevant) > 3:
        raise RecognitionError(
            f"{len(relevant)} relevant singular points: "
            + ", ".join(p.show_location() for p in relevant)
        )
    slots = _slots(field, relevant)
    if slots is None:
        return None
    mu = moebius_from_points(field, slots, (field.zero, field.one, INFINITY))
    moved = ode if mu.is_identity() else pullback_ode(ode, mu.inverse().as_ratfunc())

    ell = RatFunc.constant(field, 0)
    for point in classify_singularities(moved):
        if point.is_infinity or point.at(field.zero) or point.at(field.one):
            continue
        if point.kind is not PointKind.IRRELEVANT:
            logger.info("singularity at %s survives the coordinate change", point.show_location())
            return None
        low = point.exponents[0] if _integer_gap(field, *point.exponents) >= 0 else point.exponents[1]
        f = point.block if point.block is not None else Poly.linear(field, point.location)
        ell = ell - RatFunc(f.derivative(), f) * low
    exponents: Dict[int, Tuple[Any, Any]] = {}
    for i, value in enumerate((field.zero, field.one)):
        exponents[i] = _raw_exponents(moved, value)
        ell = ell - RatFunc(Poly.constant(field, exponents[i][0]), Poly.linear(field, value))
    normal = gauge_transform(moved, ell) if not ell.is_zero else moved

    a, b = _raw_exponents(normal, INFINITY)
    c = field.one - (exponents[0][1] - exponents[0][0])
    params = HpgParams(field, a, b, c)
    if hpg_operator(params) != normal:
        logger.info("normalized equation is not hypergeometric with parameters %s", params.show())
        return None
    return mu, params


def hypergeometric_log_criterion(p: HpgParams, point) -> bool:
    """
    Logarithm test at a point of {0, 1, infinity} with exponent difference 1:
    logarithmic exactly when the differences at the other two points differ
    in absolute value.

    Raises:
        InvalidParameterError: the point is not 0, 1 or infinity
        HypothesisViolationError: the exponent difference there is not 1
    """
    field = p.field
    one = field.one
    differences = {0: one - p.c, 1: p.c - p.a - p.b, None: p.a - p.b}
    raw = _raw(field, point)
    if raw is INFINITY:
        key = None
    elif not raw:
        key = 0
    elif not (raw - one):
        key = 1
    else:
        raise InvalidParameterError(f"{field.show(raw)} is not a singular point of the hypergeometric equation")
    here = differences.pop(key)
    if here != one and here != -one:
        raise HypothesisViolationError(f"exponent difference {field.show(here)} is not 1")
    first, second = differences.values()
    return not (first == second or first == -second)
