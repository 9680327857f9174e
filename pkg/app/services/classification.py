"""
Classification of pull-back transformations between hypergeometric equations.

Given which exponent differences below are restricted to 1/k, the
enumerator lists the admissible degrees, the branching patterns whose
pulled-back equation has exactly three singular points, and the resulting
exponent differences above. Recorded statuses come from the table
registry. Decomposition of coverings into Moebius-adjusted constituents is
done by factoring the bivariate polynomial of f(x) = g(y).
"""
import logging
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from sympy.polys.rings import ring

from app.algebra.polys import (
    INFINITY,
    Poly,
    RatFunc,
    linear_roots,
    moebius_act,
    moebius_from_points,
)
from app.catalog.tables import EndomorphismRing, TableName, TableRow, find_rows, get_table
from app.core.errors import DivisionByZeroError, FieldMismatchError, PatternMismatchError
from app.schemas.schemas import (
    AffineForm,
    BranchingPattern,
    Candidate,
    CandidateStatus,
    ExponentTriple,
    RestrictionQuery,
)
from app.services.ramification import (
    degree_formula_check,
    hurwitz_part_count,
    parse_pattern,
    singular_values,
    transform_exponents,
)


logger = logging.getLogger(__name__)

FREE_PARAMETERS = (AffineForm(v=Fraction(1)), AffineForm(w=Fraction(1)), AffineForm(z=Fraction(1)))
HYPERBOLIC_MAX_K3 = 24
PARAMETRIC_INSTANCES = (1, 2, 3)


# Degrees
def admissible_degrees(q: RestrictionQuery) -> List[int]:
    """Degrees d <= bound with d - sum floor(d/k_j) <= 1 and d >= max k_j."""
    low = max(q.denominators, default=1)
    degrees = []
    for d in range(max(low, 1), q.degree_bound + 1):
        if d - sum(d // k for k in q.denominators) <= 1:
            degrees.append(d)
    return degrees


def below_triple(q: RestrictionQuery) -> ExponentTriple:
    """Restricted differences 1/k_j first, then free parameters p, q, r."""
    entries = [AffineForm(u=Fraction(1, k)) for k in q.denominators]
    entries += list(FREE_PARAMETERS[: 3 - q.N])
    return ExponentTriple(entries=tuple(entries))


def _partitions(total: int, max_parts: int, exclude: Optional[int] = None, largest: Optional[int] = None):
    """Descending partitions of total into at most max_parts parts, none equal to exclude."""
    if total == 0:
        yield []
        return
    if max_parts == 0:
        return
    top = total if largest is None else min(largest, total)
    for part in range(top, 0, -1):
        if part == exclude:
            continue
        for rest in _partitions(total - part, max_parts - 1, exclude, part):
            yield [part] + rest


def _exactly(total: int, parts: int):
    """Partitions of total into exactly ``parts`` positive parts."""
    for partition in _partitions(total, parts):
        if len(partition) == parts:
            yield partition


class CandidateEnumerator:
    """
    Enumerates candidate pull-back transformations for a restriction query.

    Args:
        singular_count: number of singular points required above
    """

    def __init__(self, singular_count: int = 3):
        self.singular_count = singular_count

    def enumerate_candidates(
        self,
        q: RestrictionQuery,
        degrees: Optional[Iterable[int]] = None,
    ) -> List[Candidate]:
        """
        All candidates for the query, one per pattern up to symmetry.

        Args:
            q: restricted denominators and degree bound
            degrees: optional subset of the admissible degrees to search

        Returns:
            Candidates ordered by degree, then by representative pattern
        """
        below = below_triple(q)
        kinds = self._kinds(q)
        wanted = set(degrees) if degrees is not None else None
        candidates: List[Candidate] = []

        for d in admissible_degrees(q):
            if wanted is not None and d not in wanted:
                continue
            seen: Set[Tuple] = set()
            found = []
            for fibers, outside in self._patterns(d, kinds, q):
                variants = self._variants(fibers, kinds)
                key = (variants[0], outside)
                if key in seen:
                    continue
                seen.add(key)
                found.append(self._candidate(below, d, variants, outside))
            found.sort(key=lambda c: tuple(tuple(-m for m in f) for f in c.patterns[0].fibers))
            logger.debug("degree %d: %d candidates for %s", d, len(found), below)
            candidates.extend(found)
        return candidates

    def _kinds(self, q: RestrictionQuery) -> List[Tuple]:
        kinds = [("restricted", k) for k in q.denominators]
        kinds += [("free", slot) for slot in range(3 - q.N)]
        return kinds

    def _fiber_choices(self, d: int, kind: Tuple) -> Dict[Tuple[int, int], List[Tuple[int, ...]]]:
        """Fibers indexed by (singular parts, total parts)."""
        choices: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {}
        limit = self.singular_count
        if kind[0] == "restricted":
            k = kind[1]
            for c in range(d // k, -1, -1):
                for rest in _partitions(d - c * k, limit, exclude=k):
                    parts = tuple(sorted([k] * c + rest, reverse=True))
                    choices.setdefault((len(rest), len(parts)), []).append(parts)
        else:
            for rest in _partitions(d, limit):
                choices.setdefault((len(rest), len(rest)), []).append(tuple(rest))
        return choices

    def _patterns(self, d: int, kinds: List[Tuple], q: RestrictionQuery):
        choices = [self._fiber_choices(d, kind) for kind in kinds]
        for keys in product(*[sorted(c) for c in choices]):
            singular = sum(key[0] for key in keys)
            parts = sum(key[1] for key in keys)
            if singular == self.singular_count and parts == d + 2:
                for fibers in product(*[choices[i][key] for i, key in enumerate(keys)]):
                    yield fibers, ()
            elif singular == 0 and q.N == 3 and min(q.denominators) >= 2:
                # every fiber unramified relative to its point: the remaining
                # ramification sits at points outside the three fibers
                spare = parts - (d + 2)
                if spare >= self.singular_count:
                    fibers = tuple(choices[i][key][0] for i, key in enumerate(keys))
                    for orders in _exactly(spare, self.singular_count):
                        yield fibers, tuple(m + 1 for m in orders)

    def _variants(self, fibers: Sequence[Tuple[int, ...]], kinds: List[Tuple]) -> List[Tuple]:
        labels = [kind if kind[0] == "restricted" else ("free",) for kind in kinds]
        variants = set()
        for sigma in permutations(range(3)):
            if all(labels[sigma[i]] == labels[i] for i in range(3)):
                variants.add(tuple(fibers[sigma[i]] for i in range(3)))
        return sorted(variants, reverse=True)

    def _candidate(
        self,
        below: ExponentTriple,
        d: int,
        variants: List[Tuple],
        outside: Tuple[int, ...],
    ) -> Candidate:
        patterns = [BranchingPattern(degree=d, fibers=v) for v in variants]
        values = singular_values(transform_exponents(patterns[0], below))
        values += [AffineForm(u=Fraction(e)) for e in outside]
        values.sort(key=lambda e: (e.slopes, -e.u))
        above = ExponentTriple(entries=tuple(values))

        status, source = CandidateStatus.UNDECIDED, None
        for pattern in patterns:
            rows = find_rows(below, above, d, pattern)
            if rows:
                row = rows[0]
                status, source = row_status(row, d), row.table.value
                above = row.above
                break
        return Candidate(
            below=below, above=above, degree=d, patterns=patterns,
            outside=outside, status=status, source=source,
        )


candidate_enumerator = CandidateEnumerator()


def enumerate_candidates(q: RestrictionQuery, degrees: Optional[Iterable[int]] = None) -> List[Candidate]:
    return candidate_enumerator.enumerate_candidates(q, degrees)


# Recorded statuses
def is_norm(m: int, ring_name: EndomorphismRing) -> bool:
    """True when m is the norm of an integer of Z[i] or Z[omega]."""
    if m <= 0:
        return False
    a = 0
    while a * a <= m:
        for b in range(a + 1):
            value = a * a + b * b if ring_name == EndomorphismRing.GAUSSIAN else a * a + a * b + b * b
            if value == m:
                return True
        a += 1
    return False


def row_status(row: TableRow, degree: int) -> CandidateStatus:
    """
    Status of a registry row at a concrete degree.

    Elliptic self-maps exist exactly for norms of the endomorphism ring;
    the quotient rows are a quadratic map composed with such a self-map.
    """
    if row.ring is None:
        return row.status
    if degree % row.quadratic_factor:
        return CandidateStatus.NO_COVERING
    if is_norm(degree // row.quadratic_factor, row.ring):
        return CandidateStatus.COVERING_KNOWN
    return CandidateStatus.NO_COVERING


# Hyperbolic case
def hyperbolic_bounds() -> List[Tuple[int, int, int, int]]:
    """Tuples (k1, k2, k3, d) allowed by the sharpened hyperbolic inequalities."""
    bounds = []
    for k1 in range(2, 4):
        for k2 in range(k1, 7):
            pair = Fraction(1, k1) + Fraction(1, k2)
            if not Fraction(2, 3) <= pair < 1:
                continue
            for k3 in range(k2, HYPERBOLIC_MAX_K3 + 1):
                excess = 1 - pair - Fraction(1, k3)
                if excess <= 0:
                    continue
                if (1 - pair) * k3 * k3 - 2 * k3 + 3 > 0:
                    continue
                top = (1 - Fraction(3, k3)) / excess
                for d in range(k3, int(top) + 1):
                    if d - d // k1 - d // k2 - d // k3 == 1:
                        bounds.append((k1, k2, k3, d))
    return bounds


def hyperbolic_candidates() -> List[Candidate]:
    """Candidates for every hyperbolic triple admitted by the bounds."""
    degrees: Dict[Tuple[int, int, int], List[int]] = {}
    for k1, k2, k3, d in hyperbolic_bounds():
        degrees.setdefault((k1, k2, k3), []).append(d)
    candidates = []
    for ks, ds in sorted(degrees.items()):
        q = RestrictionQuery(denominators=ks, degree_bound=max(ds))
        candidates.extend(enumerate_candidates(q, ds))
    return candidates


# Parametric families of elliptic self-maps
def enumerate_parametric(instances: Iterable[int] = PARAMETRIC_INSTANCES) -> List[Candidate]:
    """
    Instantiate the template rows of the elliptic table.

    Raises:
        PatternMismatchError: an instantiated pattern disagrees with its row
    """
    candidates = []
    for row in get_table(TableName.ELLIPTIC):
        for n in instances:
            d = row.degree_at(n)
            pattern = parse_pattern(row.pattern, n)
            if pattern.degree != d:
                raise PatternMismatchError(f"{row.pattern} at n={n} has degree {pattern.degree}, expected {d}")
            if not hurwitz_part_count(pattern):
                raise PatternMismatchError(f"{pattern} does not have {d + 2} points above")
            values = singular_values(transform_exponents(pattern, row.below))
            if ExponentTriple(entries=tuple(values)).sorted_key() != row.above.sorted_key():
                raise PatternMismatchError(f"{pattern} pulls {row.below} back to {values}, not {row.above}")
            if not degree_formula_check(row.below, row.above, d):
                raise PatternMismatchError(f"degree {d} violates the degree formula for {row.below}")
            candidates.append(Candidate(
                below=row.below,
                above=row.above,
                degree=d,
                patterns=[pattern],
                status=row_status(row, d),
                source=f"{row.table.value}:{row.degree_text}",
            ))
    return candidates


# Decomposition
def _bivariate_factors(f: RatFunc, outer: RatFunc) -> List[RatFunc]:
    """All h with outer(h) = f, read off the factors of num_f(x) den_g(y) - den_f(x) num_g(y)."""
    field = f.field
    field.check_same(outer.field)
    if field.is_parameter:
        raise FieldMismatchError("decomposition needs numeric coefficients")
    R, X, Y = ring("x,y", field.domain)

    terms: Dict[Tuple[int, int], object] = {}

    def accumulate(px: Poly, py: Poly, sign: int) -> None:
        for i, a in enumerate(px.coeffs):
            for j, b in enumerate(py.coeffs):
                if a and b:
                    value = a * b if sign > 0 else -(a * b)
                    terms[(i, j)] = terms.get((i, j), field.zero) + value

    accumulate(f.num, outer.den, 1)
    accumulate(f.den, outer.num, -1)
    polynomial = R.from_dict({m: c for m, c in terms.items() if c})
    if not polynomial:
        return []

    target = f.degree // outer.degree if outer.degree else 0
    found: List[RatFunc] = []
    _, factors = polynomial.factor_list()
    for factor, _ in factors:
        if factor.degree(Y) != 1:
            continue
        slope = _x_part(factor.coeff_wrt(Y, 1), field)
        offset = _x_part(factor.coeff_wrt(Y, 0), field)
        if slope.is_zero:
            continue
        h = RatFunc(-offset, slope)
        if h.degree != target or h in found:
            continue
        if outer.compose(h) == f:
            found.append(h)
    return found


def _x_part(poly, field) -> Poly:
    coeffs: Dict[int, object] = {}
    for (i, _), c in poly.terms():
        coeffs[i] = c
    top = max(coeffs, default=-1)
    return Poly(field, tuple(coeffs.get(i, field.zero) for i in range(top + 1)))


def critical_values(f: RatFunc) -> List[object]:
    """Critical values of f lying in its field; ``INFINITY`` for infinity."""
    field = f.field
    values: List[object] = []

    def add(value) -> None:
        if not any(_same_point(value, v) for v in values):
            values.append(value)

    wronskian = f.num.derivative() * f.den - f.num * f.den.derivative()
    if not wronskian.is_zero:
        for root, _ in linear_roots(wronskian):
            try:
                add(f(root))
            except DivisionByZeroError:
                add(INFINITY)
    if wronskian.degree < 2 * f.degree - 2:
        if f.num.degree > f.den.degree:
            add(INFINITY)
        elif f.num.degree < f.den.degree:
            add(field.zero)
        else:
            add(f.num.LC / f.den.LC)
    return values


def _same_point(a, b) -> bool:
    if a is INFINITY or b is INFINITY:
        return a is b
    return not (a - b)


def _frames(f: RatFunc):
    """Moebius maps sending 0, 1, infinity to ordered triples of critical values of f."""
    field = f.field
    points = critical_values(f)
    for extra in (field.zero, field.one, INFINITY):
        if len(points) >= 3:
            break
        if not any(_same_point(extra, p) for p in points):
            points.append(extra)
    standard = (field.zero, field.one, INFINITY)
    for triple in permutations(points, 3):
        yield moebius_from_points(field, standard, triple)


def _chains(f: RatFunc, candidates: Sequence[RatFunc]) -> Dict[Tuple[int, ...], List[RatFunc]]:
    chains: Dict[Tuple[int, ...], List[RatFunc]] = {}
    for c in candidates:
        if c.degree < 2 or f.degree % c.degree:
            continue
        for frame in _frames(f):
            outer = moebius_act(frame, c, "target")
            for h in _bivariate_factors(f, outer):
                if h.degree == 1:
                    chains.setdefault((f.degree,), [f])
                    continue
                for degrees, sub in _chains(h, candidates).items():
                    chains.setdefault(degrees + (c.degree,), sub + [outer])
    return chains


def decompose_covering(f: RatFunc, candidates: Sequence[RatFunc]) -> List[List[RatFunc]]:
    """
    Ways to write f as a composition of Moebius-adjusted candidates.

    Each chain lists its constituents from the innermost (applied first to
    x) to the outermost, and composes exactly to f. One chain is returned
    per sequence of constituent degrees.
    """
    chains = _chains(f, candidates)
    result = [chain for degrees, chain in sorted(chains.items()) if len(degrees) >= 2]
    logger.debug("degree %d covering: %d decompositions", f.degree, len(result))
    return result


def composition_label(chain: Sequence[RatFunc]) -> str:
    """Degrees from the innermost constituent, e.g. ``2x3``."""
    if len(chain) < 2:
        return "indecomposable"
    return "x".join(str(g.degree) for g in chain)


def moebius_equivalent(f: RatFunc, g: RatFunc) -> bool:
    """True when f = g(mu(x)) for a Moebius map mu over the common field."""
    if f.field != g.field or f.degree != g.degree:
        return False
    return any(h.degree == 1 for h in _bivariate_factors(f, g))
