"""
Small-degree Belyi coverings by undetermined coefficients.

A pattern (F0, F1, Finf) is normalized by placing the largest part over
infinity at x = infinity, the largest part over 0 at x = 0 and the largest
part over 1 at x = 1. The covering is then

    phi = c * x^e0 * prod P_m^m / prod Q_m^m,
    phi - 1 = c * (x - 1)^e1 * prod R_m^m / prod Q_m^m,

with monic P_m, Q_m, R_m whose roots are the remaining points of order m.
Matching coefficients of c*A - B - c*C gives as many equations as unknowns;
the system is solved over sympy sparse polynomial rings by linear
substitution, factor splitting and resultant elimination.
"""
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

from sympy.polys.rings import ring

from app.algebra.fields import ExactField
from app.algebra.polys import Poly, RatFunc, adjoin_root, factor_list, poly_gcd
from app.core.config import settings
from app.core.errors import DegreeTooLargeError, HpgError
from app.schemas.schemas import BranchingPattern, NumberFieldSpec
from app.services.classification import moebius_equivalent
from app.services.ramification import analyze_covering


logger = logging.getLogger(__name__)

Solution = Tuple[ExactField, Dict[str, object]]


class CoveringSolver:
    """
    Solves the polynomial system of a branching pattern.

    Args:
        max_degree: largest degree accepted by ``solve_covering``
    """

    def __init__(self, max_degree: Optional[int] = None):
        self.max_degree = max_degree if max_degree is not None else settings.HPG_MAX_SOLVER_DEGREE

    def solve_covering(
        self,
        pattern: BranchingPattern,
        field_hint: Optional[NumberFieldSpec] = None,
    ) -> List[RatFunc]:
        """
        All coverings with the given pattern, up to Moebius maps of the source.

        Args:
            pattern: fibers over 0, 1 and infinity
            field_hint: number field to solve over; without it the solver
                may adjoin one root of an irreducible factor itself

        Returns:
            Coverings normalized at 0, 1, infinity; empty when none exists

        Raises:
            DegreeTooLargeError: degree above the configured bound
        """
        pattern = pattern.canonical()
        d = pattern.degree
        if d > self.max_degree:
            raise DegreeTooLargeError(f"degree {d} exceeds the solver bound {self.max_degree}")

        field = ExactField.from_spec(field_hint) if field_hint else ExactField.rational()
        system = _PatternSystem(pattern, field)
        solutions = _Elimination(may_extend=field_hint is None).solve(
            system.equations, field, system.nonzero
        )
        logger.info("pattern %s: %d raw solutions", pattern, len(solutions))

        coverings: List[RatFunc] = []
        for solution_field, values in solutions:
            if set(values) != set(system.names):
                logger.debug("skipping a solution that leaves %s free", set(system.names) - set(values))
                continue
            try:
                phi = system.covering(solution_field, values)
                report = analyze_covering(phi)
            except HpgError as exc:
                logger.debug("discarding degenerate solution: %s", exc)
                continue
            if report.pattern != pattern or not report.is_belyi:
                logger.debug("discarding %s with pattern %s", phi.show(), report.pattern)
                continue
            if any(moebius_equivalent(phi, known) for known in coverings):
                continue
            coverings.append(phi)
        return coverings


class _PatternSystem:
    """Unknowns and coefficient equations of one normalized pattern."""

    def __init__(self, pattern: BranchingPattern, field: ExactField):
        over_zero, over_one, over_inf = pattern.fibers
        self.degree = pattern.degree
        self.e0, self.e1, self.einf = over_zero[0], over_one[0], over_inf[0]
        self.blocks = {
            "p": _multiplicities(over_zero[1:]),
            "r": _multiplicities(over_one[1:]),
            "q": _multiplicities(over_inf[1:]),
        }

        names = ["c"]
        constant_terms = []
        for prefix, blocks in self.blocks.items():
            for m, count in blocks.items():
                for i in range(count):
                    names.append(f"{prefix}{m}_{i}")
                constant_terms.append(f"{prefix}{m}_0")
        self.names = names

        R, *gens = ring(["x"] + names, field.domain)
        self.ring = R
        x, unknowns = gens[0], dict(zip(names, gens[1:]))

        def block_product(prefix: str):
            total = R.one
            for m, count in self.blocks[prefix].items():
                monic = x ** count + sum(unknowns[f"{prefix}{m}_{i}"] * x ** i for i in range(count))
                total *= monic ** m
            return total

        c = unknowns["c"]
        A = x ** self.e0 * block_product("p")
        B = block_product("q")
        C = (x - 1) ** self.e1 * block_product("r")
        identity = c * A - B - c * C

        S = R.clone(symbols=names)
        self.equations = [identity.coeff_wrt(x, i).set_ring(S) for i in range(self.degree)]
        self.nonzero = {"c", *constant_terms}

    def covering(self, field: ExactField, values: Dict[str, object]) -> RatFunc:
        x = Poly.x(field)

        def block_product(prefix: str) -> Poly:
            total = Poly.constant(field, 1)
            for m, count in self.blocks[prefix].items():
                coeffs = [field.convert(values[f"{prefix}{m}_{i}"]) for i in range(count)] + [field.one]
                total = total * Poly(field, tuple(coeffs)) ** m
            return total

        A = x ** self.e0 * block_product("p")
        return RatFunc(A * field.convert(values["c"]), block_product("q"))


def _multiplicities(parts: Sequence[int]) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    for m in parts:
        counts[m] = counts.get(m, 0) + 1
    return counts


class _Elimination:
    """Recursive solver for zero-dimensional systems in a sparse ring."""

    def __init__(self, may_extend: bool = True):
        self.may_extend = may_extend

    def solve(self, equations, field: ExactField, nonzero: Set[str], presplit: bool = False) -> List[Solution]:
        equations = [e for e in equations if e]
        if any(e.is_ground for e in equations):
            return []
        if not equations:
            return [(field, {})]

        linear = _linear_pivot(equations)
        if linear is not None:
            return self._substitute(equations, field, nonzero, *linear)
        if not presplit:
            return self._split(equations, field, nonzero)

        variables = _variables(equations)
        if len(variables) == 1:
            return self._univariate(equations, field, variables.pop(), {}, nonzero)
        return self._eliminate(equations, field, nonzero)

    def _substitute(self, equations, field, nonzero, eq, v) -> List[Solution]:
        """Solve ``eq`` for ``v``, a variable occurring linearly with a constant coefficient."""
        R = eq.ring
        gen = _gen_of(eq, v)
        slope = eq.coeff_wrt(gen, 1).const()
        expression = -(eq - eq.coeff_wrt(gen, 1) * gen) * R.domain.quo(R.domain.one, slope)
        rest = [other.compose(gen, expression) for other in equations if other != eq]

        results = []
        for solution_field, values in self.solve(rest, field, nonzero):
            try:
                value = _evaluate(expression, solution_field, values)
            except KeyError:
                continue
            if v in nonzero and not value:
                continue
            values = dict(values)
            values[v] = value
            results.append((solution_field, values))
        return results

    def _split(self, equations, field: ExactField, nonzero: Set[str]) -> List[Solution]:
        """Drop factors that cannot vanish, then branch on the first reducible equation."""
        reduced = []
        branch_at, branch_factors = None, []
        for eq in equations:
            _, factors = eq.factor_list()
            kept = [f for f, _ in factors if not f.is_ground and not _is_nonzero_variable(f, nonzero)]
            if not kept:
                return []
            if len(kept) > 1 and branch_at is None:
                branch_at, branch_factors = len(reduced), kept
            product = eq.ring.one
            for f in kept:
                product *= f
            reduced.append(product)

        if branch_at is None:
            return self.solve(reduced, field, nonzero, presplit=True)
        results: List[Solution] = []
        for f in branch_factors:
            branch = list(reduced)
            branch[branch_at] = f
            results.extend(self.solve(branch, field, nonzero))
        return results

    def _eliminate(self, equations, field: ExactField, nonzero: Set[str]) -> List[Solution]:
        variables = _variables(equations)
        v = min(variables, key=lambda name: (max(e.degree(_gen_of(e, name)) for e in equations), name))
        with_v = [e for e in equations if e.degree(_gen_of(e, v)) > 0]
        pivot = min(with_v, key=lambda e: (e.degree(_gen_of(e, v)), len(e.terms())))

        R = pivot.ring
        order = [s for s in R.symbols if str(s) == v] + [s for s in R.symbols if str(s) != v]
        Rv = R.clone(symbols=order)
        pivot_v = pivot.set_ring(Rv)
        rest = []
        for e in equations:
            if e is pivot:
                continue
            if e.degree(_gen_of(e, v)) > 0:
                rest.append(pivot_v.resultant(e.set_ring(Rv)).set_ring(R))
            else:
                rest.append(e)
        logger.debug("eliminated %s from %d equations", v, len(equations))

        results: List[Solution] = []
        for solution_field, values in self.solve(rest, field, nonzero):
            results.extend(self._univariate(with_v, solution_field, v, values, nonzero))
        return results

    def _univariate(
        self,
        equations,
        field: ExactField,
        v: str,
        known: Dict[str, object],
        nonzero: Set[str],
    ) -> List[Solution]:
        """Common roots in ``v`` of the equations after substituting ``known``."""
        gcd = None
        for eq in equations:
            try:
                p = _specialize(eq, field, v, known)
            except KeyError:
                return []
            if p.is_zero:
                continue
            gcd = p if gcd is None else poly_gcd(gcd, p)
        if gcd is None:
            logger.debug("%s is not determined; skipping a positive-dimensional component", v)
            return []
        if gcd.degree < 1:
            return []

        results: List[Solution] = []
        for f, _ in factor_list(gcd):
            if f.degree == 1:
                root = -f.coeff(0) / f.coeff(1)
                if v in nonzero and not root:
                    continue
                results.append(_extended(field, known, v, root))
            elif self.may_extend and field.is_rational:
                extended = adjoin_root(f)
                logger.info("adjoining a root of %s", f.show("s"))
                results.append(_extended(extended, known, v, extended.generator()))
            else:
                logger.info("skipping roots of %s over %s", f.show("s"), field.name)
        return results


def _is_nonzero_variable(f, nonzero: Set[str]) -> bool:
    names = _variables([f])
    if len(names) != 1 or len(f.terms()) != 1:
        return False
    name = names.pop()
    return name in nonzero and f.degree(_gen_of(f, name)) == 1


def _variables(equations) -> Set[str]:
    names: Set[str] = set()
    for e in equations:
        for monom in e.monoms():
            for symbol, power in zip(e.ring.symbols, monom):
                if power:
                    names.add(str(symbol))
    return names


def _gen_of(e, name: str):
    R = e.ring
    return R.gens[[str(s) for s in R.symbols].index(name)]


def _linear_pivot(equations):
    """An equation and a variable occurring linearly with a constant coefficient."""
    best = None
    for eq in equations:
        for name in sorted(_variables([eq])):
            gen = _gen_of(eq, name)
            if eq.degree(gen) != 1:
                continue
            slope = eq.coeff_wrt(gen, 1)
            if slope.is_ground and slope:
                key = (len(eq.terms()), name)
                if best is None or key < best[0]:
                    best = (key, eq, name)
    return None if best is None else (best[1], best[2])


def _evaluate(poly, field: ExactField, values: Dict[str, object]):
    """Value of a sparse polynomial at a full assignment, in ``field``."""
    total = field.zero
    symbols = [str(s) for s in poly.ring.symbols]
    for monom, coeff in poly.terms():
        term = field.convert(coeff)
        for name, power in zip(symbols, monom):
            if power:
                term = term * values[name] ** power
        total = total + term
    return total


def _specialize(poly, field: ExactField, v: str, known: Dict[str, object]) -> Poly:
    """The univariate polynomial in ``v`` left after substituting ``known``."""
    coeffs: Dict[int, object] = {}
    symbols = [str(s) for s in poly.ring.symbols]
    for monom, coeff in poly.terms():
        term = field.convert(coeff)
        power_v = 0
        for name, power in zip(symbols, monom):
            if not power:
                continue
            if name == v:
                power_v = power
            else:
                term = term * known[name] ** power
        coeffs[power_v] = coeffs.get(power_v, field.zero) + term
    top = max(coeffs, default=-1)
    return Poly(field, tuple(coeffs.get(i, field.zero) for i in range(top + 1)))


def _extended(field: ExactField, known: Dict[str, object], v: str, value) -> Solution:
    values = {name: field.convert(val) for name, val in known.items()}
    values[v] = value
    return field, values


def solve_covering(pattern: BranchingPattern, field_hint: Optional[NumberFieldSpec] = None) -> List[RatFunc]:
    return CoveringSolver().solve_covering(pattern, field_hint)
