"""
Exact coefficient fields.

Three kinds of fields are supported: Q itself, simple algebraic extensions
Q(alpha) = Q[t]/(m(t)), and the rational function field Q(a) in one formal
parameter. Each is a thin wrapper around a sympy ground domain; raw domain
elements (gmpy rationals, ``ANP`` vectors, ``FracElement`` fractions) are what
polynomials and series store, while :class:`FieldElement` is the public value
type with operator overloading.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence

from sympy import CRootOf, Poly as SymPoly, Symbol, QQ
from sympy.polys.polyerrors import CoercionFailed

from app.core.errors import DivisionByZeroError, FieldMismatchError, PoleAtSampleError
from app.schemas.schemas import NumberFieldSpec


logger = logging.getLogger(__name__)

IRREDUCIBILITY_CHECK_DEGREE = 4


def qq(value: Any):
    """Convert an int, Fraction or numeric string to a sympy QQ element."""
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


class ExactField:
    """A coefficient field: Q, Q(alpha) or Q(a)."""

    def __init__(
        self,
        domain,
        kind: str,
        name: str,
        spec: Optional[NumberFieldSpec] = None,
        parameter: Optional[str] = None,
    ):
        self.domain = domain
        self.kind = kind
        self.name = name
        self.spec = spec
        self.parameter = parameter

    # Constructors
    @classmethod
    def rational(cls) -> "ExactField":
        return _RATIONAL

    @classmethod
    def from_spec(cls, spec: NumberFieldSpec) -> "ExactField":
        """
        Build Q(alpha) from a declared minimal polynomial.

        Degree one specs collapse to Q. Irreducibility is checked up to
        degree four and trusted (with a warning) above.
        """
        if spec.degree == 1:
            return _RATIONAL

        t = Symbol(spec.generator)
        high_first = [qq(c) for c in reversed(spec.minpoly)]
        minpoly = SymPoly.from_list(high_first, t, domain=QQ)

        if spec.degree <= IRREDUCIBILITY_CHECK_DEGREE:
            if not minpoly.is_irreducible:
                raise FieldMismatchError(f"minimal polynomial {minpoly.as_expr()} is reducible over Q")
        else:
            logger.warning("trusting irreducibility of degree %d polynomial %s", spec.degree, minpoly.as_expr())

        domain = QQ.algebraic_field((minpoly, CRootOf(minpoly, 0)), alias=spec.generator)
        if [Fraction(int(c.numerator), int(c.denominator)) for c in domain.mod.to_list()] != list(reversed(spec.minpoly)):
            raise FieldMismatchError(f"sympy normalized the modulus of {spec.generator} unexpectedly")
        return cls(domain, "algebraic", f"Q({spec.generator})", spec=spec)

    @classmethod
    def parameter_field(cls, name: str = "a") -> "ExactField":
        """The rational function field Q(name)."""
        return cls(QQ.frac_field(Symbol(name)), "parameter", f"Q({name})", parameter=name)

    @classmethod
    def compositum(cls, generators: Sequence[Any], alias: str = "theta") -> "ExactField":
        """Simple extension generated by several algebraic sympy expressions."""
        domain = QQ.algebraic_field(*generators, alias=alias)
        coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(domain.mod.to_list())]
        spec = NumberFieldSpec(generator=alias, minpoly=coeffs)
        return cls(domain, "algebraic", f"Q({alias})", spec=spec)

    # Properties
    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def is_algebraic(self) -> bool:
        return self.kind == "algebraic"

    @property
    def is_parameter(self) -> bool:
        return self.kind == "parameter"

    @property
    def degree(self) -> int:
        return self.spec.degree if self.spec else 1

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactField):
            return NotImplemented
        return self.kind == other.kind and self.domain == other.domain

    def __hash__(self) -> int:
        return hash((self.kind, self.name))

    def __repr__(self) -> str:
        return f"ExactField({self.name})"

    # Raw element helpers
    def convert(self, value: Any):
        """Coerce ints, Fractions, numeric strings or raw domain elements."""
        if isinstance(value, FieldElement):
            self.check_same(value.field)
            return value.value
        if isinstance(value, (int, Fraction, str)):
            return self.domain.convert_from(qq(value), QQ)
        try:
            return self.domain.convert(value)
        except CoercionFailed as exc:
            raise FieldMismatchError(f"cannot coerce {value!r} into {self.name}") from exc

    def check_same(self, other: "ExactField") -> None:
        if other != self:
            raise FieldMismatchError(f"{other.name} is not {self.name}")

    def generator(self):
        """Raw generator: alpha for Q(alpha), the parameter for Q(a)."""
        if self.is_algebraic:
            return self.domain.unit
        if self.is_parameter:
            return self.domain.gens[0]
        raise FieldMismatchError("Q has no generator")

    def from_vector(self, coeffs: Iterable[Any]):
        """Element c0 + c1*alpha + ... from a low-first rational vector."""
        result = self.zero
        power = self.one
        for c in coeffs:
            result = result + power * self.convert(c)
            if self.is_rational:
                break
            power = power * self.generator()
        return result

    def to_vector(self, value) -> List[Fraction]:
        """Low-first coefficient vector over Q (number fields only)."""
        if self.is_rational:
            return [_fraction(value)]
        if self.is_algebraic:
            return [_fraction(c) for c in reversed(value.to_list())] or [Fraction(0)]
        raise FieldMismatchError("Q(a) elements have no coefficient vector")

    def is_rational_value(self, value) -> bool:
        if self.is_rational:
            return True
        if self.is_algebraic:
            return len(value.to_list()) <= 1
        return value.numer.is_ground and value.denom.is_ground

    def to_fraction(self, value) -> Fraction:
        """Exact rational value of a constant element."""
        if not self.is_rational_value(value):
            raise FieldMismatchError(f"{self.show(value)} is not rational")
        if self.is_rational:
            return _fraction(value)
        if self.is_algebraic:
            coeffs = value.to_list()
            return _fraction(coeffs[0]) if coeffs else Fraction(0)
        return _fraction(value.numer.const()) / _fraction(value.denom.const())

    def is_integer_value(self, value) -> bool:
        return self.is_rational_value(value) and self.to_fraction(value).denominator == 1

    def specialize(self, value, sample: Fraction):
        """Evaluate a Q(a) element at a = sample, returning a QQ element."""
        if not self.is_parameter:
            return value
        gen = self.domain.gens[0].numer.ring.gens[0]
        den = value.denom.evaluate(gen, qq(sample))
        if not den:
            raise PoleAtSampleError(f"denominator {value.denom.as_expr()} vanishes at {self.parameter}={sample}")
        num = value.numer.evaluate(gen, qq(sample))
        return QQ.convert(num) / QQ.convert(den)

    def show(self, value) -> str:
        """Plain text rendering used in reports and catalog dumps."""
        if self.is_rational:
            return str(_fraction(value))
        if self.is_parameter:
            return str(value.as_expr())
        terms = []
        for power, c in enumerate(self.to_vector(value)):
            if c == 0:
                continue
            gen = self.spec.generator if power == 1 else f"{self.spec.generator}^{power}"
            if power == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(gen)
            elif c == -1:
                terms.append(f"-{gen}")
            else:
                terms.append(f"{c}*{gen}")
        if not terms:
            return "0"
        return "+".join(terms).replace("+-", "-")


def _fraction(value) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


_RATIONAL = ExactField(QQ, "rational", "Q")


@dataclass(frozen=True, eq=False)
class FieldElement:
    """An exact number living in a declared field."""

    field: ExactField
    value: Any

    def _other(self, other):
        if isinstance(other, FieldElement):
            self.field.check_same(other.field)
            return other.value
        return self.field.convert(other)

    def __add__(self, other):
        return FieldElement(self.field, self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.value - self._other(other))

    def __rsub__(self, other):
        return FieldElement(self.field, self._other(other) - self.value)

    def __mul__(self, other):
        return FieldElement(self.field, self.value * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        divisor = self._other(other)
        if not divisor:
            raise DivisionByZeroError(f"division of {self} by zero")
        return FieldElement(self.field, self.value / divisor)

    def __rtruediv__(self, other):
        return FieldElement(self.field, self._other(other)) / self

    def __neg__(self):
        return FieldElement(self.field, -self.value)

    def __pow__(self, n: int):
        if n < 0:
            return (FieldElement(self.field, self.field.one) / self) ** (-n)
        result = self.field.one
        for _ in range(n):
            result = result * self.value
        return FieldElement(self.field, result)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.one) / self

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                return False
            return not (self.value - other.value)
        try:
            return not (self.value - self.field.convert(other))
        except FieldMismatchError:
            return False

    def __hash__(self) -> int:
        return hash((self.field, str(self)))

    def __bool__(self) -> bool:
        return bool(self.value)

    def __str__(self) -> str:
        return self.field.show(self.value)

    def __repr__(self) -> str:
        return f"FieldElement({self.field.name}, {self})"


def field_arith(op: str, x: FieldElement, y: Optional[FieldElement] = None):
    """
    Apply one field operation.

    Args:
        op: one of add, sub, mul, div, neg, inv, eq, pow
        x: left operand
        y: right operand (unused for neg and inv; an int for pow)

    Returns:
        FieldElement result, or bool for eq
    """
    if y is not None and isinstance(y, FieldElement) and y.field != x.field:
        raise FieldMismatchError(f"{x.field.name} vs {y.field.name}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    if op == "eq":
        return x == y
    if op == "pow":
        return x ** int(y)
    raise ValueError(f"unknown field operation {op!r}")


def embed_rational(q: Any, field: ExactField) -> FieldElement:
    """Constant element of ``field`` equal to the rational ``q``."""
    return FieldElement(field, field.convert(Fraction(q)))


def specialize_parameter(x: FieldElement, value: Any) -> FieldElement:
    """Evaluate an element of Q(a) at a rational value of a."""
    if not x.field.is_parameter:
        raise FieldMismatchError(f"{x.field.name} has no formal parameter")
    return FieldElement(ExactField.rational(), x.field.specialize(x.value, Fraction(value)))


def parameter_element(field: ExactField) -> FieldElement:
    return FieldElement(field, field.generator())
