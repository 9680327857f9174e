"""
Certification of catalog entries.

Two pipelines run per entry. The series pipeline compares both sides of an
identity (or a closed-form evaluation) coefficient by coefficient, over
Q(a) when the formal parameter is present and at rational samples of any
second parameter. The ramification pipeline re-derives the branching
pattern of the covering and the exponent differences it produces. Entries
declaring a composition or a Coxeter flag get the matching extra checks.
"""
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.algebra.expressions import FormulaEvaluator, split_top_level
from app.algebra.fields import ExactField
from app.algebra.polys import Poly, RatFunc, compose_ratfunc
from app.algebra.series import HpgIdentity, HpgParams, RadicalFactor, hpg_series
from app.catalog.loader import CatalogEntry
from app.catalog.tables import find_rows
from app.core.config import settings
from app.core.errors import (
    CoefficientMismatchError,
    DivisionByZeroError,
    FieldMismatchError,
    HpgError,
    InvalidParameterError,
    PoleAtSampleError,
    SeriesError,
)
from app.schemas.schemas import (
    AffineForm,
    CandidateStatus,
    Certificate,
    CheckResult,
    CheckVerdict,
    VerificationSummary,
)
from app.services.classification import moebius_equivalent
from app.services.ramification import (
    analyze_covering,
    hurwitz_part_count,
    singular_values,
    transform_exponents,
)


logger = logging.getLogger(__name__)

PRECISION_SLACK = 12
RETRY_SLACK = 30
RESAMPLE_SHIFT = Fraction(1, 11)
RESAMPLE_ATTEMPTS = 3
MUTATION_POWER = 2
MUTATION_SEED = 0

PASS, FAIL, SKIP = CheckVerdict.PASS, CheckVerdict.FAIL, CheckVerdict.SKIP


def _canonical(form: AffineForm) -> AffineForm:
    """Exponent differences are defined up to sign; fix the first nonzero slope positive."""
    lead = next((c for c in (*form.slopes, form.u) if c), 0)
    return form.scale(-1) if lead < 0 else form


def exponent_multiset(forms: Iterable[AffineForm]) -> List[Tuple]:
    return sorted((f.slopes, f.u) for f in map(_canonical, forms))


def _show_values(values: Dict[str, Fraction]) -> str:
    return ", ".join(f"{name}={value}" for name, value in sorted(values.items()))


def _lift(f: RatFunc, field: ExactField) -> RatFunc:
    """Move a covering over Q into ``field``."""
    if f.field == field:
        return f
    if not f.field.is_rational:
        raise FieldMismatchError(f"cannot move {f.field.name} coefficients into {field.name}")
    return f.map_coeffs(lambda c: field.domain.convert_from(c, f.field.domain), field)


class VerificationEngine:
    """
    Runs the certification pipelines over a loaded catalog.

    Args:
        catalog: every loaded entry (composition checks look entries up here)
        order: series order; coefficients 0..order are compared
        samples: default values of sampled second parameters
    """

    def __init__(
        self,
        catalog: Sequence[CatalogEntry],
        order: Optional[int] = None,
        samples: Optional[Sequence[Fraction]] = None,
    ):
        self.catalog = {entry.id: entry for entry in catalog}
        self.order = order if order is not None else settings.HPG_ORDER
        self.samples = list(samples) if samples else settings.sample_values()

    # Series pipeline
    def verify_identity(self, entry: CatalogEntry, order: Optional[int] = None) -> Certificate:
        """Certify F(tilde; x) = theta * F(params; phi) and its companion identity."""
        order = order if order is not None else self.order
        cert = Certificate(entry_id=entry.id, order=order)
        if not entry.is_identity:
            cert.checks.append(CheckResult(name="identity", verdict=SKIP, detail="no identity data"))
            return cert

        for plan in entry.sample_plan(self.samples):
            values, checks = self._with_resampling(entry, plan, lambda v: self._identity_checks(entry, v, order))
            if values:
                cert.samples.append(_show_values(values))
            cert.checks.extend(checks)
        return cert

    def verify_evaluation(self, entry: CatalogEntry, order: Optional[int] = None) -> Certificate:
        """Certify F(params; phi) = rhs as Puiseux expansions in x^(1/k)."""
        order = order if order is not None else self.order
        cert = Certificate(entry_id=entry.id, order=order)
        if not entry.is_evaluation:
            cert.checks.append(CheckResult(name="evaluation", verdict=SKIP, detail="no closed form"))
            return cert

        for plan in entry.sample_plan(self.samples):
            values, checks = self._with_resampling(entry, plan, lambda v: [self._evaluation_check(entry, v, order)])
            if values:
                cert.samples.append(_show_values(values))
            cert.checks.extend(checks)
        return cert

    def _with_resampling(self, entry: CatalogEntry, plan: Dict[str, Fraction], run):
        values = dict(plan)
        for attempt in range(RESAMPLE_ATTEMPTS + 1):
            try:
                return values, run(values)
            except (PoleAtSampleError, InvalidParameterError, DivisionByZeroError) as exc:
                if not values or attempt == RESAMPLE_ATTEMPTS:
                    detail = f"{exc} at {_show_values(values)}" if values else str(exc)
                    return values, [CheckResult(name="series", verdict=FAIL, detail=detail)]
                logger.warning("%s: %s at %s, resampling", entry.id, exc.code, _show_values(values))
                values = {name: value + RESAMPLE_SHIFT for name, value in values.items()}
        return values, []

    def build_identity(self, entry: CatalogEntry, values: Dict[str, Fraction], order: int) -> HpgIdentity:
        ev = entry.evaluator(order + PRECISION_SLACK, values)
        field = ev.field
        text, free_constant = entry.theta_text()
        theta = ev.radical_factor(text, normalized=free_constant) if text else RadicalFactor.unit(field)
        return HpgIdentity(
            self._params(ev, entry.record.tilde),
            self._params(ev, entry.record.params),
            ev.ratfunc(entry.record.phi),
            theta,
        )

    def _params(self, ev: FormulaEvaluator, text: str) -> HpgParams:
        values = ev.constants_list(text)
        if len(values) != 3:
            raise HpgError(f"expected three hypergeometric parameters in {text!r}")
        return HpgParams(ev.field, *values)

    def _identity_checks(self, entry: CatalogEntry, values: Dict[str, Fraction], order: int) -> List[CheckResult]:
        identity = self.build_identity(entry, values, order)
        checks = [self._series_check("identity", identity, order)]
        companion = identity.companion()
        if companion is None:
            checks.append(CheckResult(name="companion", verdict=SKIP, detail="no companion solution at 0"))
        else:
            checks.append(self._series_check("companion", companion, order))
        return checks

    def _series_check(self, name: str, identity: HpgIdentity, order: int) -> CheckResult:
        try:
            mismatch = identity.first_mismatch(order + 1)
            if mismatch is not None:
                raise CoefficientMismatchError(f"{name} sides differ", mismatch)
        except CoefficientMismatchError as exc:
            logger.info("%s: first mismatch at coefficient %d", name, exc.index)
            return CheckResult(name=name, verdict=FAIL, detail=f"first mismatch at coefficient {exc.index}")
        except (SeriesError, FieldMismatchError) as exc:
            return CheckResult(name=name, verdict=FAIL, detail=str(exc))
        return CheckResult(name=name, verdict=PASS, detail=f"coefficients 0..{order} agree")

    def _evaluation_check(self, entry: CatalogEntry, values: Dict[str, Fraction], order: int) -> CheckResult:
        k = entry.substitution_index
        target = Fraction(order + 1, k)
        for slack in (PRECISION_SLACK, RETRY_SLACK):
            try:
                difference = self._first_difference(entry, values, target, order + slack)
            except SeriesError as exc:
                if "does not reach" in exc.message and slack != RETRY_SLACK:
                    logger.debug("%s: precision %d too low, retrying", entry.id, order + slack)
                    continue
                return CheckResult(name="evaluation", verdict=FAIL, detail=str(exc))
            if difference is None:
                variable = "t" if k > 1 else "x"
                return CheckResult(name="evaluation", verdict=PASS, detail=f"{variable}-coefficients 0..{order} agree")
            index = difference * k
            return CheckResult(name="evaluation", verdict=FAIL, detail=f"first mismatch at coefficient {index}")
        return CheckResult(name="evaluation", verdict=FAIL, detail="precision not reached")

    def _first_difference(self, entry: CatalogEntry, values: Dict[str, Fraction], target: Fraction, precision: int):
        ev = entry.evaluator(precision, values)
        params = self._params(ev, entry.record.params)
        phi = ev.expansion(entry.record.phi)
        if phi.v <= 0:
            raise SeriesError("argument does not vanish at 0", location="inner-not-vanishing")
        terms = math.ceil(phi.precision / phi.v) + 1
        lhs = phi.compose_into(hpg_series(params, terms))
        if entry.record.theta:
            lhs = ev.expansion(entry.record.theta) * lhs
        rhs = ev.expansion(entry.record.rhs)
        return lhs.first_difference(rhs, target)

    # Ramification pipeline
    def verify_ramification(self, entry: CatalogEntry) -> Certificate:
        """Branching pattern, Hurwitz count and transformed exponent differences."""
        cert = Certificate(entry_id=entry.id)
        if entry.phi is None:
            cert.checks.append(CheckResult(name="ramification", verdict=SKIP, detail="argument lives on a genus 1 curve"))
            return cert

        report = analyze_covering(entry.phi)
        cert.report = report
        if entry.pattern is not None:
            same = report.pattern.fibers == entry.pattern.fibers
            cert.checks.append(CheckResult(
                name="pattern",
                verdict=PASS if same else FAIL,
                detail=str(report.pattern) if same else f"computed {report.pattern}, declared {entry.pattern}",
            ))
        counted = hurwitz_part_count(report.pattern)
        cert.checks.append(CheckResult(
            name="hurwitz",
            verdict=PASS if counted else FAIL,
            detail=f"{report.pattern.part_count} points above, degree {report.pattern.degree}",
        ))
        if entry.below is not None and entry.above is not None:
            pulled = singular_values(transform_exponents(report.pattern, entry.below))
            expected = singular_values(entry.above.entries)
            same = exponent_multiset(pulled) == exponent_multiset(expected)
            shown = ",".join(str(v) for v in pulled)
            cert.checks.append(CheckResult(
                name="exponents",
                verdict=PASS if same else FAIL,
                detail=f"({shown})" if same else f"pulled back to ({shown}), declared {entry.above}",
            ))
        return cert

    def verify_composition(self, entry: CatalogEntry) -> Certificate:
        """The declared chain, composed outermost first, gives phi up to a Moebius map."""
        cert = Certificate(entry_id=entry.id)
        if not entry.composition:
            return cert
        chain = [self.catalog.get(name) for name in entry.composition]
        if any(part is None for part in chain):
            missing = [n for n, part in zip(entry.composition, chain) if part is None]
            cert.checks.append(CheckResult(name="composition", verdict=FAIL, detail=f"unknown entries {missing}"))
            return cert
        if entry.phi is None or any(part.phi is None for part in chain):
            cert.checks.append(CheckResult(name="composition", verdict=SKIP, detail="radical argument"))
            return cert

        composed = None
        for part in chain:
            g = _lift(part.phi, entry.field)
            composed = g if composed is None else compose_ratfunc(composed, g)
        same = composed == entry.phi or moebius_equivalent(entry.phi, composed)
        label = " o ".join(entry.composition)
        cert.checks.append(CheckResult(name="composition", verdict=PASS if same else FAIL, detail=label))
        return cert

    def verify_table(self, entry: CatalogEntry) -> Certificate:
        """A declared Coxeter flag agrees with the registry row of the transformation."""
        cert = Certificate(entry_id=entry.id)
        flag = entry.record.coxeter
        if flag is None:
            return cert
        if entry.below is None or entry.above is None or entry.record.degree is None:
            cert.checks.append(CheckResult(name="table", verdict=FAIL, detail="coxeter flag without triples"))
            return cert
        rows = [
            row for row in find_rows(entry.below, entry.above, entry.record.degree)
            if row.status == CandidateStatus.COVERING_KNOWN
        ]
        if not rows:
            cert.checks.append(CheckResult(name="table", verdict=FAIL, detail="no recorded row"))
        elif rows[0].coxeter != flag:
            cert.checks.append(CheckResult(name="table", verdict=FAIL, detail=f"recorded coxeter={rows[0].coxeter}"))
        else:
            cert.checks.append(CheckResult(name="table", verdict=PASS, detail=f"{rows[0].table.value} row"))
        return cert

    # Drivers
    def verify_entry(self, entry: CatalogEntry) -> Certificate:
        cert = Certificate(entry_id=entry.id, order=self.order)
        steps = [self.verify_ramification, self.verify_composition, self.verify_table]
        if entry.is_identity:
            steps.insert(0, self.verify_identity)
        elif entry.is_evaluation:
            steps.insert(0, self.verify_evaluation)
        for step in steps:
            try:
                cert = cert.merge(step(entry))
            except HpgError as exc:
                logger.info("%s: %s failed: %s", entry.id, step.__name__, exc)
                cert.checks.append(CheckResult(name=step.__name__.replace("verify_", ""), verdict=FAIL, detail=str(exc)))
        logger.debug("%s: %s", entry.id, cert.verdict.value)
        return cert

    def verify_all(self, entries: Optional[Sequence[CatalogEntry]] = None, jobs: Optional[int] = None) -> VerificationSummary:
        """Certify entries (all by default) with a worker pool; report ordered by id."""
        entries = list(entries if entries is not None else self.catalog.values())
        jobs = max(jobs or settings.HPG_JOBS, 1)
        if jobs == 1:
            certificates = [self.verify_entry(entry) for entry in entries]
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                certificates = list(pool.map(self.verify_entry, entries))
        certificates.sort(key=lambda c: c.entry_id)
        summary = VerificationSummary(certificates=certificates)
        logger.info("verified %d entries, %d failed", len(certificates), len(summary.failed))
        return summary


def select_entries(
    entries: Sequence[CatalogEntry],
    classes: Sequence[str] = (),
    ids: Sequence[str] = (),
) -> List[CatalogEntry]:
    """Entries matching any requested class and any requested id."""
    chosen = []
    for entry in entries:
        if classes and entry.entry_class not in classes:
            continue
        if ids and entry.id not in ids:
            continue
        chosen.append(entry)
    return chosen


MutationSite = Tuple[str, int]


def mutation_sites(entry: CatalogEntry, order: int) -> List[MutationSite]:
    """
    Places where adding 1 changes a series checked up to ``order``: numerator
    and denominator coefficients of phi, each hypergeometric parameter, and
    the prefactor (theta, or rhs for evaluations).
    """
    sites: List[MutationSite] = []
    if entry.phi is not None:
        num, den = entry.phi.num, entry.phi.den
        sites += [("phi-numerator", j) for j in range(len(num.coeffs)) if j <= order]
        v = num.valuation()
        sites += [("phi-denominator", j) for j in range(len(den.coeffs)) if v + j <= order]
    if entry.record.params:
        sites += [("params", k) for k in range(len(split_top_level(entry.record.params)))]
    if entry.is_identity or entry.is_evaluation:
        sites.append(("theta", 0))
    return sites


def mutate(entry: CatalogEntry, site: Optional[MutationSite] = None) -> CatalogEntry:
    """
    Negative control: the same entry with 1 added at one site. The default
    site is the x^MUTATION_POWER coefficient of the argument's numerator.

    Raises:
        InvalidParameterError: the entry has no such site
    """
    kind, index = site or (("phi-numerator", MUTATION_POWER) if entry.phi is not None else ("params", 0))
    record, phi = entry.record, entry.phi
    if kind in ("phi-numerator", "phi-denominator"):
        if phi is None:
            raise InvalidParameterError(f"{entry.id}: the argument is not a rational function")
        bump = Poly.x(phi.field) ** index
        if kind == "phi-numerator":
            phi = RatFunc(phi.num + bump, phi.den)
        else:
            phi = RatFunc(phi.num, phi.den + bump)
        record = record.model_copy(update={"phi": phi.show()})
    elif kind == "params":
        values = split_top_level(record.params or "")
        if not 0 <= index < len(values):
            raise InvalidParameterError(f"{entry.id}: no parameter {index}")
        values[index] = f"({values[index]})+1"
        record = record.model_copy(update={"params": ", ".join(values)})
    elif kind == "theta":
        if entry.is_evaluation:
            record = record.model_copy(update={"rhs": f"({record.rhs})*(1+x)"})
        else:
            theta = f"({record.theta})*(1+x)" if record.theta else "1+x"
            record = record.model_copy(update={"theta": theta})
    else:
        raise InvalidParameterError(f"unknown mutation site {kind!r}")
    return replace(entry, record=record, phi=phi)


def sample_mutants(
    entries: Sequence[CatalogEntry],
    count: int,
    order: int,
    seed: int = MUTATION_SEED,
) -> List[CatalogEntry]:
    """``count`` entries chosen with a seeded generator, each mutated at one random site."""
    rng = random.Random(seed)
    chosen = rng.sample(list(entries), min(count, len(entries)))
    mutants = []
    for entry in chosen:
        site = rng.choice(mutation_sites(entry, order))
        logger.debug("mutating %s at %s %d", entry.id, *site)
        mutants.append(mutate(entry, site))
    return mutants
