"""
Truncated Puiseux series with exact coefficients.

A :class:`TruncSeries` stores the coefficients of ``x^(j/r)`` for
``j = 0 .. n-1``; anything at or beyond ``x^(n/r)`` is unknown. Results of
arithmetic never claim more coefficients than the least precise operand.
:class:`LocalExpansion` adds a rational monomial factor so closed forms with
fractional valuations can be multiplied before their monomials cancel.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from app.algebra.fields import ExactField
from app.algebra.polys import Poly, RatFunc
from app.core.errors import DivisionByZeroError, InvalidParameterError, SeriesError


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """Coefficients of x^(j/r), j < n, over an exact field."""

    field: ExactField
    coeffs: Tuple[Any, ...]
    r: int = 1

    @property
    def n(self) -> int:
        return len(self.coeffs)

    # Constructors
    @classmethod
    def zero(cls, field: ExactField, n: int, r: int = 1) -> "TruncSeries":
        return cls(field, (field.zero,) * n, r)

    @classmethod
    def one(cls, field: ExactField, n: int, r: int = 1) -> "TruncSeries":
        return cls.constant(field, field.one, n, r)

    @classmethod
    def constant(cls, field: ExactField, value, n: int, r: int = 1) -> "TruncSeries":
        coeffs = [field.zero] * n
        if n:
            coeffs[0] = field.convert(value)
        return cls(field, tuple(coeffs), r)

    @classmethod
    def from_values(cls, field: ExactField, values: Sequence[Any], n: Optional[int] = None, r: int = 1):
        coeffs = [field.convert(v) for v in values]
        n = len(coeffs) if n is None else n
        coeffs = (coeffs + [field.zero] * n)[:n]
        return cls(field, tuple(coeffs), r)

    @classmethod
    def from_poly(cls, p: Poly, n: int) -> "TruncSeries":
        coeffs = [p.coeff(i) for i in range(n)]
        return cls(p.field, tuple(coeffs), 1)

    @classmethod
    def from_ratfunc(cls, f: RatFunc, n: int) -> "TruncSeries":
        den = cls.from_poly(f.den, n)
        if not den.coeffs[0]:
            raise SeriesError("rational function has a pole at x = 0")
        return series_arith("div", cls.from_poly(f.num, n), den)

    # Shape helpers
    def ramify(self, r: int) -> "TruncSeries":
        """The same series written with ramification index r (a multiple of self.r)."""
        if r == self.r:
            return self
        if r % self.r:
            raise SeriesError(f"cannot refine ramification {self.r} to {r}")
        step = r // self.r
        coeffs = [self.field.zero] * (self.n * step)
        for j, c in enumerate(self.coeffs):
            coeffs[j * step] = c
        return TruncSeries(self.field, tuple(coeffs), r)

    def truncate(self, n: int) -> "TruncSeries":
        return TruncSeries(self.field, self.coeffs[:n], self.r)

    def valuation(self) -> Optional[int]:
        """Index of the first nonzero coefficient, or None when all known ones vanish."""
        for j, c in enumerate(self.coeffs):
            if c:
                return j
        return None

    def coefficient(self, j: int):
        if j >= self.n:
            raise SeriesError(f"coefficient {j} is beyond the truncation order {self.n}")
        return self.coeffs[j]

    def specialize(self, sample) -> "TruncSeries":
        rational = ExactField.rational()
        return TruncSeries(rational, tuple(self.field.specialize(c, sample) for c in self.coeffs), self.r)

    # Arithmetic
    def _pair(self, other: "TruncSeries") -> Tuple["TruncSeries", "TruncSeries"]:
        self.field.check_same(other.field)
        r = _lcm(self.r, other.r)
        return self.ramify(r), other.ramify(r)

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.field, other, self.n, self.r)
        return series_arith("add", self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.field, other, self.n, self.r)
        return series_arith("sub", self, other)

    def __rsub__(self, other):
        return TruncSeries.constant(self.field, other, self.n, self.r) - self

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_arith("mul", self, other)
        c = self.field.convert(other)
        return TruncSeries(self.field, tuple(c * a for a in self.coeffs), self.r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return series_arith("div", self, other)
        c = self.field.convert(other)
        if not c:
            raise DivisionByZeroError("series divided by zero")
        return self * (self.field.one / c)

    def __neg__(self):
        return TruncSeries(self.field, tuple(-c for c in self.coeffs), self.r)

    def __pow__(self, k: int):
        if k < 0:
            return TruncSeries.one(self.field, self.n, self.r) / (self ** (-k))
        result = TruncSeries.one(self.field, self.n, self.r)
        for _ in range(k):
            result = result * self
        return result

    def derivative(self) -> "TruncSeries":
        """d/dx of an unramified series."""
        if self.r != 1:
            raise SeriesError("derivative needs an unramified series")
        coeffs = tuple(self.coeffs[j] * j for j in range(1, self.n))
        return TruncSeries(self.field, coeffs, 1)

    def agrees_with(self, other: "TruncSeries") -> Optional[int]:
        """First index where the two series differ within common precision, else None."""
        left, right = self._pair(other)
        for j in range(min(left.n, right.n)):
            if left.coeffs[j] - right.coeffs[j]:
                return j
        return None

    def show(self, var: str = "x", terms: int = 8) -> str:
        parts = []
        for j, c in enumerate(self.coeffs[:terms]):
            if not c:
                continue
            exp = Fraction(j, self.r)
            monom = "" if exp == 0 else (var if exp == 1 else f"{var}^{exp}")
            text = self.field.show(c)
            if monom and any(ch in text[1:] for ch in "+-/"):
                text = f"({text})"
            parts.append(text if not monom else f"{text}*{monom}")
        body = " + ".join(parts) or "0"
        return f"{body} + O({var}^{Fraction(self.n, self.r)})"

    def __repr__(self) -> str:
        return f"TruncSeries({self.show()})"


def series_arith(op: str, s: TruncSeries, t: TruncSeries) -> TruncSeries:
    """
    Add, subtract, multiply or divide two truncated series.

    Ramification indices are brought to their lcm first; the result is known
    only up to the smaller of the two truncations.
    """
    s, t = s._pair(t)
    n = min(s.n, t.n)
    K = s.field.domain
    a, b = s.coeffs[:n], t.coeffs[:n]
    if op == "add":
        return TruncSeries(s.field, tuple(x + y for x, y in zip(a, b)), s.r)
    if op == "sub":
        return TruncSeries(s.field, tuple(x - y for x, y in zip(a, b)), s.r)
    if op == "mul":
        out = [K.zero] * n
        for i, x in enumerate(a):
            if not x:
                continue
            for j in range(n - i):
                if b[j]:
                    out[i + j] += x * b[j]
        return TruncSeries(s.field, tuple(out), s.r)
    if op == "div":
        if not n:
            return TruncSeries(s.field, (), s.r)
        if not b[0]:
            raise SeriesError("division by a series without constant term", location="division-by-zero-series")
        inv = K.one / b[0]
        out = []
        for k in range(n):
            acc = a[k]
            for j in range(1, k + 1):
                if b[j]:
                    acc -= b[j] * out[k - j]
            out.append(acc * inv)
        return TruncSeries(s.field, tuple(out), s.r)
    raise ValueError(f"unknown series operation {op!r}")


def series_compose(outer: TruncSeries, inner: TruncSeries) -> TruncSeries:
    """
    outer(inner(x)) for an unramified outer series and an inner series
    without constant term.
    """
    if outer.r != 1:
        raise SeriesError("outer series must be unramified")
    outer.field.check_same(inner.field)
    w = inner.valuation()
    if w == 0:
        raise SeriesError("inner series does not vanish at 0", location="inner-not-vanishing")
    if w is None:
        # inner vanishes to its full precision
        return TruncSeries.constant(outer.field, outer.coeffs[0] if outer.n else 0, inner.n, inner.r)
    n = min(inner.n, outer.n * w)
    inner = inner.truncate(n)
    result = [outer.field.zero] * n
    power = TruncSeries.one(outer.field, n, inner.r)
    for k in range(min(outer.n, (n - 1) // w + 1)):
        a_k = outer.coeffs[k]
        if a_k:
            for j in range(k * w, n):
                if power.coeffs[j]:
                    result[j] += a_k * power.coeffs[j]
        power = power * inner
    return TruncSeries(outer.field, tuple(result), inner.r)


def series_pow(s: TruncSeries, e) -> TruncSeries:
    """
    (1 + u)^e by the exact power recurrence; e may be any field element.

    Uses k g_k = sum_{j=1..k} ((e + 1) j - k) f_j g_{k-j}, valid in units of
    x^(1/r) because the recurrence only involves the Euler operator.
    """
    field = s.field
    if not s.n:
        return s
    if s.coeffs[0] != field.one:
        raise SeriesError("power of a series whose constant term is not 1", location="non-unit-leading-term")
    e = field.convert(e)
    f = s.coeffs
    g = [field.one]
    e1 = e + field.one
    for k in range(1, s.n):
        acc = field.zero
        for j in range(1, k + 1):
            if f[j]:
                acc += (e1 * j - k) * f[j] * g[k - j]
        g.append(acc / field.convert(k))
    return TruncSeries(field, tuple(g), s.r)


@dataclass(frozen=True, eq=False)
class HpgParams:
    """Upper parameters a, b and lower parameter c of 2F1."""

    field: ExactField
    a: Any
    b: Any
    c: Any

    @classmethod
    def of(cls, field: ExactField, a, b, c) -> "HpgParams":
        return cls(field, field.convert(a), field.convert(b), field.convert(c))

    def specialize(self, sample) -> "HpgParams":
        rational = ExactField.rational()
        return HpgParams(rational, *(self.field.specialize(v, sample) for v in (self.a, self.b, self.c)))

    def swapped(self) -> "HpgParams":
        return HpgParams(self.field, self.b, self.a, self.c)

    def same_as(self, other: "HpgParams") -> bool:
        """Equality up to the order of the upper parameters."""
        if other.c != self.c:
            return False
        return (other.a == self.a and other.b == self.b) or (other.a == self.b and other.b == self.a)

    def show(self) -> str:
        return ", ".join(self.field.show(v) for v in (self.a, self.b, self.c))


def _is_nonpositive_integer(field: ExactField, value) -> bool:
    return field.is_integer_value(value) and field.to_fraction(value) <= 0


def hpg_series(p: HpgParams, order: int) -> TruncSeries:
    """
    2F1(a, b; c; x) with ``order`` coefficients.

    Raises:
        InvalidParameterError: c is a non-positive integer
    """
    field = p.field
    if order < 1:
        raise SeriesError("series order must be at least 1")
    if _is_nonpositive_integer(field, p.c):
        raise InvalidParameterError(f"lower parameter {field.show(p.c)} is a non-positive integer", location="invalid-c")
    coeffs = [field.one]
    term = field.one
    for k in range(order - 1):
        num = (p.a + k) * (p.b + k)
        if not num:
            coeffs.extend([field.zero] * (order - 1 - k))
            break
        term = term * num / ((p.c + k) * (k + 1))
        coeffs.append(term)
    return TruncSeries(field, tuple(coeffs), 1)


@dataclass(frozen=True, eq=False)
class RadicalFactor:
    """constant * prod p_i(x)^e_i with every p_i a unit at x = 0."""

    field: ExactField
    factors: Tuple[Tuple[Poly, Any], ...] = ()
    constant: Any = None

    def __post_init__(self):
        if self.constant is None:
            object.__setattr__(self, "constant", self.field.one)
        for p, _ in self.factors:
            if not p(0):
                raise SeriesError(f"radical base {p.show()} vanishes at x = 0")

    @classmethod
    def unit(cls, field: ExactField) -> "RadicalFactor":
        return cls(field)

    @classmethod
    def of(cls, field: ExactField, pairs: Iterable[Tuple[Poly, Any]], constant=1) -> "RadicalFactor":
        return cls(field, tuple((p, field.convert(e)) for p, e in pairs), field.convert(constant))

    def log_derivative(self) -> RatFunc:
        """theta'/theta = sum e_i p_i'/p_i."""
        total = RatFunc.constant(self.field, 0)
        for p, e in self.factors:
            total = total + RatFunc(p.derivative() * e, p)
        return total

    def specialize(self, sample) -> "RadicalFactor":
        rational = ExactField.rational()
        return RadicalFactor(
            rational,
            tuple((p.specialize(sample), self.field.specialize(e, sample)) for p, e in self.factors),
            self.field.specialize(self.constant, sample),
        )

    def show(self) -> str:
        parts = [] if self.constant == self.field.one else [self.field.show(self.constant)]
        for p, e in self.factors:
            parts.append(f"({p.show()})^({self.field.show(e)})")
        return "*".join(parts) or "1"


def radical_series(f: RadicalFactor, order: int) -> TruncSeries:
    """Series of a radical factor; each base is scaled to constant term 1 first."""
    field = f.field
    result = TruncSeries.constant(field, f.constant, order)
    for p, e in f.factors:
        c0 = p(0)
        scale = exact_power(field, c0, e)
        unit = TruncSeries.from_poly(p * (field.one / c0), order)
        result = result * series_pow(unit, e) * scale
    return result


def exact_power(field: ExactField, base, e):
    """base^e when it lies in the field: integer e, base 1, or an exact rational root."""
    if base == field.one:
        return field.one
    if field.is_integer_value(e):
        k = int(field.to_fraction(e))
        return base ** k if k >= 0 else field.one / base ** (-k)
    if field.is_rational_value(e) and field.is_rational_value(base):
        root = _rational_root(field.to_fraction(base), field.to_fraction(e))
        if root is not None:
            return field.convert(root)
    raise SeriesError(
        f"{field.show(base)}^({field.show(e)}) is not in {field.name}",
        location="non-unit-leading-term",
    )


def _integer_root(n: int, k: int) -> Optional[int]:
    if n < 0:
        if k % 2 == 0:
            return None
        root = _integer_root(-n, k)
        return -root if root is not None else None
    lo, hi = 0, 1
    while hi ** k <= n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


def _rational_root(q: Fraction, e: Fraction) -> Optional[Fraction]:
    num = _integer_root(q.numerator, e.denominator)
    den = _integer_root(q.denominator, e.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** e.numerator


@dataclass(frozen=True, eq=False)
class LocalExpansion:
    """
    x^v times a series in x^(1/r) whose constant term is nonzero.

    A vanishing series means the value is zero up to absolute precision
    ``v + n/r``.
    """

    v: Fraction
    series: TruncSeries

    @property
    def field(self) -> ExactField:
        return self.series.field

    @property
    def precision(self) -> Fraction:
        """Exponents below this are known exactly."""
        return self.v + Fraction(self.series.n, self.series.r)

    @property
    def is_zero(self) -> bool:
        return self.series.valuation() is None

    @classmethod
    def from_series(cls, s: TruncSeries, v=Fraction(0)) -> "LocalExpansion":
        return cls(Fraction(v), s).normalized()

    @classmethod
    def constant(cls, field: ExactField, value, precision: int) -> "LocalExpansion":
        return cls.from_series(TruncSeries.constant(field, value, precision))

    @classmethod
    def monomial(cls, field: ExactField, v, precision: Fraction) -> "LocalExpansion":
        v = Fraction(v)
        r = (precision - v).denominator if precision > v else 1
        n = max(int((precision - v) * r), 1)
        return cls(v, TruncSeries.one(field, n, r))

    @classmethod
    def from_ratfunc(cls, f: RatFunc, precision: int) -> "LocalExpansion":
        num, den = f.num, f.den
        vn, vd = num.valuation(), den.valuation()
        n = max(precision - (vn - vd), 1)
        stripped = RatFunc(Poly(num.field, num.coeffs[vn:]), Poly(den.field, den.coeffs[vd:]))
        series = TruncSeries.from_ratfunc(stripped, n)
        return cls(Fraction(vn - vd), series).normalized()

    def normalized(self) -> "LocalExpansion":
        j = self.series.valuation()
        if j is None or j == 0:
            return self
        s = self.series
        return LocalExpansion(self.v + Fraction(j, s.r), TruncSeries(s.field, s.coeffs[j:], s.r))

    def leading(self):
        """Leading coefficient (the constant term of the unit part)."""
        if self.is_zero:
            raise SeriesError("leading coefficient of an expansion that vanishes to its precision")
        return self.series.coeffs[0]

    def _aligned(self, other: "LocalExpansion"):
        self.field.check_same(other.field)
        v = min(self.v, other.v)
        precision = min(self.precision, other.precision)
        r = _lcm(self.series.r, other.series.r)
        for q in (self.v - v, other.v - v, precision - v):
            r = _lcm(r, q.denominator)
        n = int((precision - v) * r)
        return v, r, self._spread(v, r, n), other._spread(v, r, n)

    def _spread(self, v: Fraction, r: int, n: int) -> TruncSeries:
        s = self.series.ramify(r)
        offset = int((self.v - v) * r)
        coeffs = ([self.field.zero] * offset + list(s.coeffs))[:n]
        coeffs += [self.field.zero] * (n - len(coeffs))
        return TruncSeries(self.field, tuple(coeffs), r)

    def __add__(self, other):
        if not isinstance(other, LocalExpansion):
            other = LocalExpansion.constant(self.field, other, max(int(self.precision) + 1, 1))
        v, _, a, b = self._aligned(other)
        return LocalExpansion(v, series_arith("add", a, b)).normalized()

    __radd__ = __add__

    def __neg__(self):
        return LocalExpansion(self.v, -self.series)

    def __sub__(self, other):
        if not isinstance(other, LocalExpansion):
            other = LocalExpansion.constant(self.field, other, max(int(self.precision) + 1, 1))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LocalExpansion):
            return LocalExpansion(self.v, self.series * other).normalized()
        self.field.check_same(other.field)
        r = _lcm(self.series.r, other.series.r)
        a, b = self.series.ramify(r), other.series.ramify(r)
        return LocalExpansion(self.v + other.v, series_arith("mul", a, b)).normalized()

    __rmul__ = __mul__

    def inverse(self) -> "LocalExpansion":
        if self.is_zero:
            raise DivisionByZeroError("inverse of an expansion that vanishes to its precision")
        one = TruncSeries.one(self.field, self.series.n, self.series.r)
        return LocalExpansion(-self.v, series_arith("div", one, self.series))

    def __truediv__(self, other):
        if not isinstance(other, LocalExpansion):
            return self * (self.field.one / self.field.convert(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def pow(self, e) -> "LocalExpansion":
        """
        Power with a field exponent. The monomial part needs a rational
        exponent; the leading coefficient must have an exact e-th power.
        """
        field = self.field
        e = field.convert(e)
        if field.is_integer_value(e):
            k = int(field.to_fraction(e))
            base = self if k >= 0 else self.inverse()
            result = LocalExpansion(Fraction(0), TruncSeries.one(field, base.series.n, base.series.r))
            for _ in range(abs(k)):
                result = result * base
            return result
        if self.is_zero:
            raise SeriesError("fractional power of an expansion that vanishes to its precision")
        if self.v:
            if not field.is_rational_value(e):
                raise SeriesError("symbolic power of a monomial", location="non-unit-leading-term")
            v = self.v * field.to_fraction(e)
        else:
            v = Fraction(0)
        c0 = self.leading()
        scale = exact_power(field, c0, e)
        unit = series_pow(self.series * (field.one / c0), e)
        return LocalExpansion(v, unit * scale)

    __pow__ = pow

    def as_series(self) -> TruncSeries:
        """The expansion as a plain Puiseux series; needs a non-negative valuation."""
        if self.v < 0:
            raise SeriesError("negative valuation has no power series")
        r = _lcm(self.series.r, self.v.denominator)
        n = int(self.precision * r)
        return self._spread(Fraction(0), r, n)

    def compose_into(self, outer: TruncSeries) -> "LocalExpansion":
        """outer(self) for an expansion with positive valuation."""
        if self.v <= 0:
            raise SeriesError("inner expansion does not vanish at 0", location="inner-not-vanishing")
        return LocalExpansion.from_series(series_compose(outer, self.as_series()))

    def first_difference(self, other: "LocalExpansion", order) -> Optional[Fraction]:
        """Smallest exponent below ``order`` where the two expansions differ, or None."""
        diff = self - other
        if diff.precision < order:
            raise SeriesError(f"precision {diff.precision} does not reach order {order}")
        if diff.is_zero or diff.v >= order:
            return None
        return diff.v

    def show(self, var: str = "x") -> str:
        prefix = "" if self.v == 0 else f"{var}^{self.v}*"
        return f"{prefix}({self.series.show(var)})"

    def __repr__(self) -> str:
        return f"LocalExpansion({self.show()})"


def pochhammer(field: ExactField, x, k: int):
    """Rising factorial (x)_k."""
    result = field.one
    for i in range(k):
        result = result * (x + i)
    return result


def appell_terminating(
    kind: str,
    numerators: Sequence[Any],
    denominators: Sequence[Any],
    m: int,
    n: int,
    arg1,
    arg2,
    field: ExactField,
):
    """
    Terminating Appell double sum over 0 <= i <= m, 0 <= j <= n.

    Args:
        kind: "F2" with numerators (a, b, b') and denominators (c, c'), or
            "F3" with numerators (a, a', b, b') and denominator (c,)
        m, n: summation bounds in the two directions
        arg1, arg2: any values supporting +, * and integer powers (field
            elements, polynomials, rational functions or series)
        field: field of the parameters

    Returns:
        the finite sum in the domain of the arguments

    Raises:
        SeriesError: no upper parameter equals -m in the first direction or
            -n in the second
        InvalidParameterError: a lower parameter vanishes inside the range
    """
    params = [field.convert(v) for v in numerators]
    lower = [field.convert(v) for v in denominators]
    if kind == "F2":
        a, b1, b2 = params
        c1, c2 = lower
        rows, columns = (b1,), (b2,)
    elif kind == "F3":
        a1, a2, b1, b2 = params
        (c,) = lower
        rows, columns = (a1, b1), (a2, b2)
    else:
        raise ValueError(f"unknown Appell kind {kind!r}")
    if not any(_terminates(field, v, m) for v in rows) or not any(_terminates(field, v, n) for v in columns):
        raise SeriesError(f"{kind} sum does not terminate at ({m}, {n})", location="non-terminating")

    total = None
    for i in range(m + 1):
        for j in range(n + 1):
            if kind == "F2":
                denom = pochhammer(field, c1, i) * pochhammer(field, c2, j)
                numer = pochhammer(field, a, i + j) * pochhammer(field, b1, i) * pochhammer(field, b2, j)
            else:
                denom = pochhammer(field, c, i + j)
                numer = pochhammer(field, a1, i) * pochhammer(field, a2, j) * pochhammer(field, b1, i) * pochhammer(field, b2, j)
            if not numer:
                continue
            if not denom:
                raise InvalidParameterError(
                    f"lower parameter vanishes in term ({i}, {j})", location="forbidden-lower-parameter"
                )
            coeff = numer / (denom * pochhammer(field, field.one, i) * pochhammer(field, field.one, j))
            term = (arg1 ** i) * (arg2 ** j) * coeff
            total = term if total is None else total + term
    if total is None:
        return (arg1 ** 0) * field.zero
    return total


def _terminates(field: ExactField, value, bound: int) -> bool:
    return field.is_integer_value(value) and -field.to_fraction(value) == bound


@dataclass(frozen=True, eq=False)
class HpgIdentity:
    """
    2F1(tilde; x) = theta(x) * 2F1(params; phi(x)) as formal series at x = 0.

    ``phi`` must vanish at x = 0 and ``theta`` is a radical product
    normalized so that theta(0) is its constant.
    """

    tilde: HpgParams
    params: HpgParams
    phi: RatFunc
    theta: RadicalFactor

    @property
    def field(self) -> ExactField:
        return self.tilde.field

    def sides(self, order: int) -> Tuple[TruncSeries, TruncSeries]:
        lhs = hpg_series(self.tilde, order)
        inner = TruncSeries.from_ratfunc(self.phi, order)
        outer = hpg_series(self.params, order)
        rhs = radical_series(self.theta, order) * series_compose(outer, inner)
        return lhs, rhs

    def first_mismatch(self, order: int) -> Optional[int]:
        lhs, rhs = self.sides(order)
        return lhs.agrees_with(rhs)

    def specialize(self, sample) -> "HpgIdentity":
        return HpgIdentity(
            self.tilde.specialize(sample),
            self.params.specialize(sample),
            self.phi.specialize(sample),
            self.theta.specialize(sample),
        )

    def companion(self) -> Optional["HpgIdentity"]:
        """
        The identity between the second local solutions at x = 0.

        With phi = x^v u(x) and v (1 - C) = 1 - C~, the solutions
        x^(1-C~) 2F1(1+A~-C~, 1+B~-C~; 2-C~; x) and
        phi^(1-C) 2F1(1+A-C, 1+B-C; 2-C; phi) are proportional; the constant
        is fixed by the leading coefficient of u. Returns None when 1 - C~
        is an integer or the exponents do not match.
        """
        field = self.field
        one = field.one
        gap = one - self.tilde.c
        if field.is_integer_value(gap):
            return None
        num, den = self.phi.num, self.phi.den
        v = num.valuation() - den.valuation()
        e = one - self.params.c
        if v <= 0 or e * v != gap:
            return None
        unit = Poly(field, num.coeffs[v:])
        pairs = [(unit * (one / unit(0)), e)]
        if den.degree > 0:
            pairs.append((den * (one / den(0)), -e))
        theta = RadicalFactor(field, self.theta.factors + tuple(pairs), one)
        t, p = self.tilde, self.params
        return HpgIdentity(
            HpgParams(field, one + t.a - t.c, one + t.b - t.c, one + gap),
            HpgParams(field, one + p.a - p.c, one + p.b - p.c, one + e),
            self.phi,
            theta,
        )

    def show(self) -> str:
        return f"F({self.tilde.show()}; x) = {self.theta.show()} * F({self.params.show()}; {self.phi.show()})"
