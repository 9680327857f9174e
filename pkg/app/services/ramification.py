"""
Branching data of rational coverings over {0, 1, infinity}.

Fiber multiplicities come from squarefree decompositions over the
coefficient field; an irreducible block of degree k contributes k points of
equal multiplicity. The point x = infinity contributes a part equal to the
degree deficit of the relevant polynomial.
"""
import logging
import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.algebra.polys import Poly, RatFunc, squarefree_decompose
from app.core.errors import ConstantMapError, InvalidParameterError, PatternParseError
from app.schemas.schemas import (
    AffineForm,
    BranchingPattern,
    ExponentTriple,
    OutsidePoint,
    RamificationReport,
)


logger = logging.getLogger(__name__)

KLEIN_GROUPS = {3: "tetrahedral", 4: "octahedral", 5: "icosahedral"}


def _fiber(p: Poly, degree: int) -> Tuple[List[int], List[Tuple[Poly, int]]]:
    parts: List[int] = []
    blocks = squarefree_decompose(p) if p.degree > 0 else []
    for g, m in blocks:
        parts.extend([m] * g.degree)
    if p.degree < degree:
        parts.append(degree - p.degree)
    return parts, blocks


def analyze_covering(f: RatFunc) -> RamificationReport:
    """
    Branching pattern and critical points outside the fibers over 0, 1, infinity.

    Raises:
        ConstantMapError: f is constant
    """
    if f.is_constant:
        raise ConstantMapError(f"{f.show()} is constant")
    d = f.degree
    num, den = f.num, f.den
    over_zero, zero_blocks = _fiber(num, d)
    over_one, one_blocks = _fiber(num - den, d)
    over_inf, inf_blocks = _fiber(den, d)
    pattern = BranchingPattern.of(over_zero, over_one, over_inf)

    # critical points: numerator of f' with the known fiber contributions removed
    wronskian = num.derivative() * den - num * den.derivative()
    for g, m in zero_blocks + one_blocks + inf_blocks:
        if m > 1:
            wronskian = wronskian.exquo(g ** (m - 1))

    outside: List[OutsidePoint] = []
    if wronskian.degree > 0:
        for g, k in squarefree_decompose(wronskian):
            outside.append(OutsidePoint(locus=g.show(), points=g.degree, multiplicity=k + 1))

    defect = pattern.part_count - (d + 2)
    at_infinity = defect - sum(p.points * (p.multiplicity - 1) for p in outside)
    if at_infinity > 0:
        outside.append(OutsidePoint(locus="infinity", points=1, multiplicity=at_infinity + 1))

    logger.debug("analyzed degree %d covering: %s, defect %d", d, pattern, defect)
    return RamificationReport(pattern=pattern, outside=outside, hurwitz_defect=defect)


def hurwitz_part_count(pattern: BranchingPattern) -> bool:
    """True when the three fibers have d + 2 points in total."""
    return pattern.part_count == pattern.degree + 2


_COUNT_TERM = re.compile(r"^\(?(?P<count>[0-9n+\-]+)\)?\*(?P<order>[0-9]+)$")


def parse_pattern(text: str, n: Optional[int] = None) -> BranchingPattern:
    """
    Parse ``2+1=3=2+1`` style notation.

    Template rows such as ``2n*2=n*4=(n-1)*4+2+1+1`` need the instantiation
    parameter ``n``; a term ``c*k`` stands for c points of order k.

    Raises:
        PatternParseError: with the offending character position
    """
    compact = text.replace(" ", "")
    fibers_text = compact.split("=")
    if len(fibers_text) != 3:
        raise PatternParseError(f"expected three fibers in {text!r}", len(compact), text)

    fibers = []
    offset = 0
    for fiber_text in fibers_text:
        parts: List[int] = []
        for term, start in _terms(fiber_text):
            position = offset + start
            if not term:
                raise PatternParseError("empty branching order", position, text)
            if term.isdigit():
                value = int(term)
                if value <= 0:
                    raise PatternParseError("branching orders are positive", position, text)
                parts.append(value)
                continue
            match = _COUNT_TERM.match(term)
            if not match:
                raise PatternParseError(f"cannot read term {term!r}", position, text)
            if "n" in match.group("count") and n is None:
                raise PatternParseError("template pattern needs a value of n", position, text)
            count = _count(match.group("count"), n, position, text)
            parts.extend([int(match.group("order"))] * count)
        if not parts:
            raise PatternParseError("empty fiber", offset, text)
        fibers.append(parts)
        offset += len(fiber_text) + 1

    sums = {sum(f) for f in fibers}
    if len(sums) != 1:
        raise PatternParseError(f"fibers of {text!r} have different sums {sorted(sums)}", 0, text)
    return BranchingPattern.of(*fibers)


def _terms(fiber_text: str):
    depth, start = 0, 0
    for i, ch in enumerate(fiber_text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "+" and depth == 0:
            yield fiber_text[start:i], start
            start = i + 1
    yield fiber_text[start:], start


def _count(expr: str, n: Optional[int], position: int, text: str) -> int:
    try:
        form = AffineForm.parse(expr.replace("n", "p"))
    except (ValueError, ZeroDivisionError) as exc:
        raise PatternParseError(f"cannot read count {expr!r}", position, text) from exc
    value = form.u + form.v * (n or 0)
    if value < 0 or value.denominator != 1:
        raise PatternParseError(f"count {expr!r} is negative at n={n}", position, text)
    return int(value)


def format_pattern(pattern: BranchingPattern) -> str:
    return str(pattern)


def pattern_notation(value, n: Optional[int] = None):
    """Parse a string or print a pattern, whichever was given."""
    if isinstance(value, BranchingPattern):
        return format_pattern(value)
    return parse_pattern(value, n)


def transform_exponents(pattern: BranchingPattern, below: ExponentTriple) -> List[AffineForm]:
    """Exponent difference m*e for every part m over a point with difference e."""
    values = []
    for fiber, e in zip(pattern.fibers, below.entries):
        for m in fiber:
            values.append(e.scale(m))
    return values


def singular_values(values: Sequence[AffineForm]) -> List[AffineForm]:
    """Differences of the pulled-back points that are not equal to 1."""
    return [v for v in values if not v.is_one()]


def degree_formula_check(below: ExponentTriple, above: ExponentTriple, d: int) -> bool:
    """d (e1 + e2 + e3 - 1) = e1' + e2' + e3' - 1 as affine forms."""
    one = AffineForm(u=Fraction(1))
    left = sum(below.entries, AffineForm()) - one
    right = sum(above.entries, AffineForm()) - one
    return left.scale(d) == right


def klein_degree(k: int, above: ExponentTriple) -> Fraction:
    """
    Degree of Klein's covering from the standard (1/2, 1/3, 1/k) equation.

    Raises:
        InvalidParameterError: k outside {3, 4, 5} or a parametric triple
    """
    if k not in KLEIN_GROUPS:
        raise InvalidParameterError(f"k must be 3, 4 or 5, got {k}")
    if not above.is_constant:
        raise InvalidParameterError("Klein degree needs a parameter-free triple")
    total = sum((e.u for e in above.entries), Fraction(0)) - 1
    degree = Fraction(6 * k, 6 - k) * total
    if degree.denominator != 1:
        logger.warning("non-integer Klein degree %s for %s", degree, above)
    return degree
