"""
Univariate polynomials, rational functions and Moebius maps over an ExactField.

Coefficients are raw sympy domain elements stored lowest degree first. The
heavy lifting (gcd, squarefree decomposition, resultants, factorization)
is delegated to sympy's dense ``dup_*`` routines, which work on high-first
lists over any ground domain.
"""
from dataclasses import dataclass, field as dc_field
from typing import Any, List, Optional, Sequence, Tuple

from sympy.polys.densearith import dup_add, dup_div, dup_mul, dup_mul_ground, dup_neg, dup_sub
from sympy.polys.densebasic import dup_strip
from sympy.polys.densetools import dup_compose, dup_diff, dup_eval, dup_monic, dup_shift
from sympy.polys.euclidtools import dup_gcd, dup_invert, dup_resultant
from sympy.polys.factortools import dup_factor_list
from sympy.polys.sqfreetools import dup_sqf_list

from app.algebra.fields import ExactField, FieldElement
from app.core.errors import DivisionByZeroError, FieldMismatchError, SingularMoebiusError
from app.schemas.schemas import NumberFieldSpec


@dataclass(frozen=True, eq=False)
class Poly:
    """A univariate polynomial; ``coeffs`` are lowest degree first."""

    field: ExactField
    coeffs: Tuple[Any, ...] = dc_field(default=())

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    # Constructors
    @classmethod
    def from_values(cls, field: ExactField, values: Sequence[Any]) -> "Poly":
        return cls(field, tuple(field.convert(v) for v in values))

    @classmethod
    def from_dup(cls, field: ExactField, rep: Sequence[Any]) -> "Poly":
        return cls(field, tuple(reversed(list(rep))))

    @classmethod
    def constant(cls, field: ExactField, value: Any) -> "Poly":
        return cls(field, (field.convert(value),))

    @classmethod
    def x(cls, field: ExactField) -> "Poly":
        return cls(field, (field.zero, field.one))

    @classmethod
    def linear(cls, field: ExactField, root: Any) -> "Poly":
        """The monic polynomial x - root."""
        return cls(field, (-field.convert(root), field.one))

    # Views
    @property
    def dup(self) -> List[Any]:
        return list(reversed(self.coeffs))

    @property
    def K(self):
        return self.field.domain

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def LC(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def coefficients(self) -> List[FieldElement]:
        return [FieldElement(self.field, c) for c in self.coeffs]

    def _wrap(self, rep) -> "Poly":
        return Poly.from_dup(self.field, dup_strip(rep))

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self.field.check_same(other.field)
            return other
        return Poly.constant(self.field, other)

    # Ring operations
    def __add__(self, other) -> "Poly":
        return self._wrap(dup_add(self.dup, self._coerce(other).dup, self.K))

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        return self._wrap(dup_sub(self.dup, self._coerce(other).dup, self.K))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            self.field.check_same(other.field)
            return self._wrap(dup_mul(self.dup, other.dup, self.K))
        return self._wrap(dup_mul_ground(self.dup, self.field.convert(other), self.K))

    __rmul__ = __mul__

    def __neg__(self) -> "Poly":
        return self._wrap(dup_neg(self.dup, self.K))

    def __pow__(self, n: int) -> "Poly":
        result = Poly.constant(self.field, 1)
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        other = self._coerce(other)
        if other.is_zero:
            raise DivisionByZeroError("polynomial division by zero")
        q, r = dup_div(self.dup, other.dup, self.K)
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other) -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other) -> "Poly":
        return self.divmod(other)[1]

    def exquo(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise DivisionByZeroError("inexact polynomial division")
        return q

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            try:
                other = self._coerce(other)
            except FieldMismatchError:
                return False
        if other.field != self.field or len(other.coeffs) != len(self.coeffs):
            return False
        return all(not (a - b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash((self.field, self.degree))

    def __bool__(self) -> bool:
        return not self.is_zero

    # Calculus and evaluation
    def derivative(self) -> "Poly":
        return self._wrap(dup_diff(self.dup, 1, self.K))

    def __call__(self, point):
        return dup_eval(self.dup, self.field.convert(point), self.K)

    def shift(self, a) -> "Poly":
        """p(x + a)."""
        return self._wrap(dup_shift(self.dup, self.field.convert(a), self.K))

    def compose(self, inner: "Poly") -> "Poly":
        """p(inner(x))."""
        return self._wrap(dup_compose(self.dup, self._coerce(inner).dup, self.K))

    def reverse(self, n: Optional[int] = None) -> "Poly":
        """x^n p(1/x), with n defaulting to the degree."""
        n = self.degree if n is None else n
        padded = list(self.coeffs) + [self.field.zero] * (n + 1 - len(self.coeffs))
        return Poly(self.field, tuple(reversed(padded[: n + 1])))

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        return self._wrap(dup_monic(self.dup, self.K))

    def scale(self, c) -> "Poly":
        return self * c

    def valuation(self) -> int:
        """Order of vanishing at x = 0."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 0

    def map_coeffs(self, fn, field: ExactField) -> "Poly":
        return Poly(field, tuple(fn(c) for c in self.coeffs))

    def specialize(self, sample) -> "Poly":
        """Evaluate a Q(a) polynomial's coefficients at a = sample."""
        rational = ExactField.rational()
        return self.map_coeffs(lambda c: self.field.specialize(c, sample), rational)

    def show(self, var: str = "x") -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            text = self.field.show(c)
            if i == 0:
                terms.append(_wrap_term(text))
                continue
            monom = var if i == 1 else f"{var}^{i}"
            if text == "1":
                terms.append(monom)
            elif text == "-1":
                terms.append("-" + monom)
            else:
                terms.append(f"{_wrap_term(text)}*{monom}")
        return "+".join(terms).replace("+-", "-")

    def __repr__(self) -> str:
        return f"Poly({self.show()} over {self.field.name})"


def _wrap_term(text: str) -> str:
    body = text[1:] if text.startswith("-") else text
    if any(ch in body for ch in "+-*") and not body.startswith("("):
        return f"({text})"
    return text


def poly_arith(op: str, p: Poly, q: Poly) -> Poly:
    """Ring operation by name: add, sub, mul."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_divmod(p: Poly, q: Poly) -> Tuple[Poly, Poly]:
    return p.divmod(q)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor."""
    p.field.check_same(q.field)
    if p.is_zero and q.is_zero:
        raise DivisionByZeroError("gcd of two zero polynomials")
    return Poly.from_dup(p.field, dup_gcd(p.dup, q.dup, p.K)).monic()


def squarefree_decompose(p: Poly) -> List[Tuple[Poly, int]]:
    """
    Squarefree decomposition p = lc * prod f_i^m_i.

    Returns:
        [(f_i, m_i)] with monic, pairwise coprime, squarefree f_i and
        strictly increasing multiplicities
    """
    if p.is_zero:
        raise DivisionByZeroError("squarefree decomposition of zero")
    _, factors = dup_sqf_list(p.dup, p.K)
    return [(Poly.from_dup(p.field, f).monic(), k) for f, k in factors]


def factor_list(p: Poly) -> List[Tuple[Poly, int]]:
    """Irreducible factors over the coefficient field (monic)."""
    if p.is_zero:
        raise DivisionByZeroError("factorization of zero")
    _, factors = dup_factor_list(p.dup, p.K)
    return [(Poly.from_dup(p.field, f).monic(), k) for f, k in factors]


def linear_roots(p: Poly) -> List[Tuple[Any, int]]:
    """Roots of p lying in the coefficient field, with multiplicities."""
    roots = []
    for f, k in factor_list(p):
        if f.degree == 1:
            roots.append((-f.coeff(0) / f.coeff(1), k))
    return roots


def resultant(p: Poly, q: Poly) -> FieldElement:
    """
    Resultant with respect to x, an element of the coefficient field.

    This is the only resultant of the public surface. Over Q(a) the value is
    a rational function of the parameter, and :func:`eliminate` reads it as a
    polynomial over Q; that is how a system in x and a is reduced to one
    variable. The covering solver eliminates its own unknowns in a sparse
    multivariate ring and does not call this function.
    """
    p.field.check_same(q.field)
    return FieldElement(p.field, dup_resultant(p.dup, q.dup, p.K))


def eliminate(p: Poly, q: Poly) -> Poly:
    """
    Resultant of two polynomials whose coefficients are polynomials in the
    formal parameter, returned as a polynomial in that parameter over Q.
    """
    if not p.field.is_parameter:
        raise FieldMismatchError("elimination needs coefficients in Q(a)")
    res = resultant(p, q).value
    if not res.denom.is_ground:
        raise FieldMismatchError("coefficients are not polynomial in the parameter")
    rational = ExactField.rational()
    scale = res.denom.const()
    numer = res.numer
    degree = numer.degree()
    coeffs = [numer.coeff_wrt(0, i).const() / scale for i in range(max(degree, 0) + 1)]
    return Poly(rational, tuple(coeffs))


def invert_mod(p: Poly, modulus: Poly) -> Poly:
    """Inverse of p modulo ``modulus``."""
    return Poly.from_dup(p.field, dup_invert(p.dup, modulus.dup, p.K))


@dataclass(frozen=True, eq=False)
class RatFunc:
    """A reduced rational function num/den with monic denominator."""

    num: Poly
    den: Poly

    def __post_init__(self):
        if self.den.is_zero:
            raise DivisionByZeroError("rational function with zero denominator")
        self.num.field.check_same(self.den.field)
        num, den = self.num, self.den
        if num.is_zero:
            num, den = num, Poly.constant(num.field, 1)
        elif den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exquo(g), den.exquo(g)
        lc = den.LC
        if lc != num.field.one:
            inv = num.field.one / lc
            num, den = num * inv, den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    # Constructors
    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p, Poly.constant(p.field, 1))

    @classmethod
    def constant(cls, field: ExactField, value) -> "RatFunc":
        return cls.from_poly(Poly.constant(field, value))

    @classmethod
    def x(cls, field: ExactField) -> "RatFunc":
        return cls.from_poly(Poly.x(field))

    @property
    def field(self) -> ExactField:
        return self.num.field

    @property
    def degree(self) -> int:
        """Map degree max(deg num, deg den)."""
        return max(self.num.degree, self.den.degree)

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            self.field.check_same(other.field)
            return other
        if isinstance(other, Poly):
            return RatFunc.from_poly(other)
        return RatFunc.constant(self.field, other)

    def __add__(self, other) -> "RatFunc":
        o = self._coerce(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFunc":
        o = self._coerce(other)
        return RatFunc(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other) -> "RatFunc":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatFunc":
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        o = self._coerce(other)
        if o.is_zero:
            raise DivisionByZeroError("division of rational functions by zero")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RatFunc":
        return self._coerce(other) / self

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except FieldMismatchError:
            return False
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.field, self.num.degree, self.den.degree))

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, point):
        den = self.den(point)
        if not den:
            raise DivisionByZeroError(f"pole at {self.field.show(self.field.convert(point))}")
        return self.num(point) / den

    def compose(self, inner: "RatFunc") -> "RatFunc":
        """self(inner(x)) in lowest terms."""
        inner = self._coerce(inner)
        n = self.degree
        powers_a = [Poly.constant(self.field, 1)]
        powers_b = [Poly.constant(self.field, 1)]
        for _ in range(n):
            powers_a.append(powers_a[-1] * inner.num)
            powers_b.append(powers_b[-1] * inner.den)

        def homogenize(p: Poly) -> Poly:
            total = Poly(self.field)
            for i, c in enumerate(p.coeffs):
                if c:
                    total = total + powers_a[i] * powers_b[n - i] * c
            return total

        return RatFunc(homogenize(self.num), homogenize(self.den))

    def map_coeffs(self, fn, field: ExactField) -> "RatFunc":
        return RatFunc(self.num.map_coeffs(fn, field), self.den.map_coeffs(fn, field))

    def specialize(self, sample) -> "RatFunc":
        return RatFunc(self.num.specialize(sample), self.den.specialize(sample))

    def show(self, var: str = "x") -> str:
        if self.den.is_constant:
            return self.num.show(var)
        return f"({self.num.show(var)})/({self.den.show(var)})"

    def __repr__(self) -> str:
        return f"RatFunc({self.show()} over {self.field.name})"


def compose_ratfunc(f: RatFunc, g: RatFunc) -> RatFunc:
    """f o g; the map degree is multiplicative."""
    return f.compose(g)


INFINITY = None


@dataclass(frozen=True, eq=False)
class Moebius:
    """x -> (a x + b)/(c x + d) with nonzero determinant."""

    field: ExactField
    a: Any
    b: Any
    c: Any
    d: Any

    def __post_init__(self):
        if not (self.a * self.d - self.b * self.c):
            raise SingularMoebiusError("Moebius determinant vanishes")

    @classmethod
    def of(cls, field: ExactField, a, b, c, d) -> "Moebius":
        return cls(field, field.convert(a), field.convert(b), field.convert(c), field.convert(d))

    @classmethod
    def identity(cls, field: ExactField) -> "Moebius":
        return cls.of(field, 1, 0, 0, 1)

    def as_ratfunc(self) -> RatFunc:
        return RatFunc(Poly(self.field, (self.b, self.a)), Poly(self.field, (self.d, self.c)))

    def compose(self, other: "Moebius") -> "Moebius":
        """self o other, as a product of matrices."""
        return Moebius(
            self.field,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Moebius":
        return Moebius(self.field, self.d, -self.b, -self.c, self.a)

    def apply(self, point):
        """Image of a raw point; ``INFINITY`` (None) stands for x = infinity."""
        if point is INFINITY:
            return INFINITY if not self.c else self.a / self.c
        den = self.c * point + self.d
        if not den:
            return INFINITY
        return (self.a * point + self.b) / den

    def is_identity(self) -> bool:
        return not self.b and not self.c and not (self.a - self.d)

    def show(self, var: str = "x") -> str:
        return self.as_ratfunc().show(var)


def moebius_act(m: Moebius, f: RatFunc, side: str) -> RatFunc:
    """Source side returns f o m; target side returns m o f."""
    if side == "source":
        return f.compose(m.as_ratfunc())
    if side == "target":
        return m.as_ratfunc().compose(f)
    raise ValueError(f"side must be 'source' or 'target', got {side!r}")


def _to_zero_one_infinity(field: ExactField, p1, p2, p3) -> Moebius:
    """The Moebius map sending p1, p2, p3 to 0, 1, infinity."""
    one, zero = field.one, field.zero
    if p1 is INFINITY:
        return Moebius(field, zero, p2 - p3, one, -p3)
    if p2 is INFINITY:
        return Moebius(field, one, -p1, one, -p3)
    if p3 is INFINITY:
        return Moebius(field, one, -p1, zero, p2 - p1)
    return Moebius(field, p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1))


def moebius_from_points(field: ExactField, source: Sequence[Any], target: Sequence[Any]) -> Moebius:
    """The unique Moebius map sending three distinct source points to three target points."""
    src = _to_zero_one_infinity(field, *source)
    dst = _to_zero_one_infinity(field, *target)
    return dst.inverse().compose(src)


def adjoin_root(f: Poly, generator: str = "s") -> ExactField:
    """Q(s) for a monic irreducible polynomial f over Q."""
    if not f.field.is_rational:
        raise FieldMismatchError(f"cannot adjoin a root over {f.field.name}")
    monic = f.monic()
    spec = NumberFieldSpec(generator=generator, minpoly=tuple(f.field.to_fraction(c) for c in monic.coeffs))
    return ExactField.from_spec(spec)
