"""
Reader for the plain-text transformation catalog.

A catalog is a sequence of blocks separated by blank lines. Each block is a
list of ``key: value`` lines; ``#`` starts a comment and indented lines
continue the previous value. Structural invariants are checked while
loading so a broken entry is reported with its line number before any
series is expanded.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError
from sympy import Poly as SympyPoly, Symbol

from app.algebra.expressions import FormulaEvaluator, parse_formula, split_top_level
from app.algebra.fields import ExactField
from app.algebra.polys import RatFunc
from app.core.config import settings
from app.core.errors import CatalogSchemaError, HpgError
from app.schemas.schemas import BranchingPattern, CatalogRecord, ExponentTriple, NumberFieldSpec
from app.services.ramification import degree_formula_check, parse_pattern


logger = logging.getLogger(__name__)

KNOWN_KEYS = {
    "id", "class", "field", "minpoly", "below", "above", "degree", "pattern", "phi", "theta",
    "tilde", "params", "rhs", "substitution", "composition", "coxeter", "samples", "radicals",
}
ENTRY_CLASSES = {
    "fractional-linear", "quadratic", "cubic", "quartic", "sextic", "cyclic", "pade", "dihedral",
    "klein-standard", "darboux", "elliptic-E1", "elliptic-E2", "elliptic-E3", "hyperbolic",
}
FORMAL_PARAMETER = "a"
FREE_CONSTANT = "K"
_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_FUNCTIONS = {"sqrt"}
_SUBSTITUTION = re.compile(r"^x\s*=\s*t\s*(\^|\*\*)\s*(?P<k>[0-9]+)$")


@dataclass
class CatalogEntry:
    """
    A loaded catalog entry.

    ``phi`` is the covering over the base field, or None when the argument
    involves declared radicals (coverings defined on a genus 1 curve).
    """

    record: CatalogRecord
    field: ExactField
    phi: Optional[RatFunc]
    below: Optional[ExponentTriple] = None
    above: Optional[ExponentTriple] = None
    pattern: Optional[BranchingPattern] = None
    composition: List[str] = field(default_factory=list)
    samples: Dict[str, List[Fraction]] = field(default_factory=dict)
    radicals: List[Tuple[str, str]] = field(default_factory=list)
    parameters: Tuple[str, ...] = ()

    @property
    def id(self) -> str:
        return self.record.id

    @property
    def entry_class(self) -> str:
        return self.record.entry_class

    @property
    def line(self) -> int:
        return self.record.line

    @property
    def is_identity(self) -> bool:
        return self.record.tilde is not None

    @property
    def is_evaluation(self) -> bool:
        return self.record.rhs is not None

    @property
    def substitution_index(self) -> int:
        """k for a declared substitution x = t^k, else 1."""
        if not self.record.substitution:
            return 1
        return int(_SUBSTITUTION.match(self.record.substitution.strip()).group("k"))

    @property
    def formal_parameter(self) -> Optional[str]:
        """The parameter kept symbolic over Q(a); only over Q."""
        if FORMAL_PARAMETER in self.parameters and not self.field.is_algebraic:
            return FORMAL_PARAMETER
        return None

    @property
    def sampled_parameters(self) -> List[str]:
        return [name for name in self.parameters if name != self.formal_parameter]

    def working_field(self) -> ExactField:
        if self.formal_parameter:
            return ExactField.parameter_field(self.formal_parameter)
        return self.field

    def sample_plan(self, defaults: Sequence[Fraction]) -> List[Dict[str, Fraction]]:
        """Assignments of the sampled parameters, one dict per run."""
        names = self.sampled_parameters
        if not names:
            return [{}]
        columns = {name: list(self.samples.get(name) or defaults) for name in names}
        count = max(len(values) for values in columns.values())
        return [{name: values[i % len(values)] for name, values in columns.items()} for i in range(count)]

    def evaluator(self, precision: int, values: Optional[Dict[str, Fraction]] = None) -> FormulaEvaluator:
        """Evaluator over the working field with samples and radicals bound."""
        ev = FormulaEvaluator.for_field(self.working_field(), precision, **(values or {}))
        for name, text in self.radicals:
            ev.bind_radical(name, text)
        return ev

    def theta_text(self) -> Tuple[Optional[str], bool]:
        """The theta formula with a free constant K removed, and whether K was present."""
        text = self.record.theta
        if text is None:
            return None, False
        names = _identifiers(text)
        if FREE_CONSTANT not in names:
            return text, False
        expr = parse_formula(text, names - {"x"}).subs(Symbol(FREE_CONSTANT), 1)
        return str(expr), True


class CatalogLoader:
    """Parses catalog files into :class:`CatalogEntry` lists."""

    def load(self, path: Union[str, Path, None] = None) -> List[CatalogEntry]:
        """
        Load and check a catalog file.

        Raises:
            CatalogSchemaError: with the line of the offending entry
        """
        path = Path(path or settings.HPG_CATALOG)
        text = path.read_text(encoding="utf-8")
        entries = self.loads(text, str(path))
        logger.info("loaded %d catalog entries from %s", len(entries), path)
        return entries

    def loads(self, text: str, path: str = "<catalog>") -> List[CatalogEntry]:
        entries: List[CatalogEntry] = []
        seen: Dict[str, int] = {}
        for line, block in self._blocks(text, path):
            entry = self._entry(line, block, path)
            if entry.id in seen:
                raise CatalogSchemaError(f"duplicate id {entry.id!r} (first at line {seen[entry.id]})", line, path)
            seen[entry.id] = line
            entries.append(entry)

        for entry in entries:
            for ref in entry.composition:
                if ref not in seen:
                    raise CatalogSchemaError(f"composition refers to unknown entry {ref!r}", entry.line, path)
        return entries

    # Text layer
    def _blocks(self, text: str, path: str):
        block: Dict[str, str] = {}
        start, last_key = 0, None
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].rstrip()
            if not content.strip():
                if not raw.strip() and block:
                    yield start, block
                    block, last_key = {}, None
                continue
            if content[0] in " \t":
                if last_key is None:
                    raise CatalogSchemaError("continuation line outside an entry", number, path)
                block[last_key] += " " + content.strip()
                continue
            key, sep, value = content.partition(":")
            key = key.strip()
            if not sep or key not in KNOWN_KEYS:
                raise CatalogSchemaError(f"unknown or malformed key in {content.strip()!r}", number, path)
            if key in block:
                raise CatalogSchemaError(f"repeated key {key!r}", number, path)
            if not block:
                start = number
            block[key] = value.strip()
            last_key = key
        if block:
            yield start, block

    # Entry layer
    def _entry(self, line: int, block: Dict[str, str], path: str) -> CatalogEntry:
        values = {("entry_class" if k == "class" else k): v for k, v in block.items()}
        values["line"] = line
        try:
            record = CatalogRecord(**values)
        except ValidationError as exc:
            problem = exc.errors()[0]
            where = ".".join(str(p) for p in problem["loc"])
            raise CatalogSchemaError(f"{where}: {problem['msg']}", line, path) from exc

        try:
            return self._check(record)
        except CatalogSchemaError as exc:
            raise CatalogSchemaError(exc.message, line, path) from exc
        except (HpgError, ValueError) as exc:
            message = exc.message if isinstance(exc, HpgError) else str(exc)
            raise CatalogSchemaError(f"{record.id}: {message}", line, path) from exc

    def _check(self, record: CatalogRecord) -> CatalogEntry:
        if record.entry_class not in ENTRY_CLASSES:
            raise CatalogSchemaError(f"unknown class {record.entry_class!r}")
        if record.tilde is not None and record.params is None:
            raise CatalogSchemaError("tilde parameters need params")
        if record.rhs is not None and record.params is None:
            raise CatalogSchemaError("a closed form needs params")
        if record.tilde is not None and record.rhs is not None:
            raise CatalogSchemaError("an entry is either an identity or an evaluation")
        if record.substitution and not _SUBSTITUTION.match(record.substitution.strip()):
            raise CatalogSchemaError(f"cannot read substitution {record.substitution!r}")

        base = _base_field(record)
        radicals = _radicals(record.radicals)
        radical_names = {name for name, _ in radicals}
        reserved = {"x", FREE_CONSTANT} | radical_names
        if base.is_algebraic:
            reserved.add(base.spec.generator)

        parameters = set()
        for text in (record.tilde, record.params, record.theta, record.rhs):
            if text:
                parameters |= _identifiers(text) - reserved
        if _identifiers(record.phi) - reserved:
            raise CatalogSchemaError("phi must not depend on parameters")

        phi = None
        if not (_identifiers(record.phi) & radical_names):
            phi = FormulaEvaluator.for_field(base).ratfunc(record.phi)
            if phi.degree != record.degree:
                raise CatalogSchemaError(f"phi has degree {phi.degree}, declared {record.degree}")
            if phi.num.valuation() == 0:
                raise CatalogSchemaError("phi does not vanish at x = 0")
        elif record.degree is None and not record.substitution:
            raise CatalogSchemaError("radical arguments need a substitution or a degree")
        if phi is None and record.degree is None:
            logger.debug("%s: degree of the radical argument is not recorded", record.id)

        pattern = None
        if record.pattern:
            pattern = parse_pattern(record.pattern)
            if pattern.degree != record.degree:
                raise CatalogSchemaError(f"pattern {record.pattern} has degree {pattern.degree}")

        below = ExponentTriple.parse(record.below) if record.below else None
        above = ExponentTriple.parse(record.above) if record.above else None
        if below and above and record.degree:
            if _names_of(above) <= _names_of(below) and not degree_formula_check(below, above, record.degree):
                raise CatalogSchemaError(f"degree formula fails for {below} <-{record.degree}- {above}")

        composition = [c.strip() for c in split_top_level(record.composition)] if record.composition else []
        return CatalogEntry(
            record=record,
            field=base,
            phi=phi,
            below=below,
            above=above,
            pattern=pattern,
            composition=composition,
            samples=_samples(record.samples),
            radicals=radicals,
            parameters=tuple(sorted(parameters)),
        )


def _identifiers(text: str) -> set:
    return set(_IDENTIFIER.findall(text)) - _FUNCTIONS


def _names_of(triple: ExponentTriple) -> set:
    names = set()
    for form in triple.entries:
        names |= {i for i, slope in enumerate(form.slopes) if slope}
    return names


def _base_field(record: CatalogRecord) -> ExactField:
    return number_field(record.field.strip(), record.minpoly)


def number_field(name: str, minpoly: Optional[str] = None) -> ExactField:
    """Q, or Q(name) with the minimal polynomial written in ``name``."""
    if name == "Q":
        if minpoly:
            raise CatalogSchemaError("minpoly given for the rational field")
        return ExactField.rational()
    if not minpoly:
        raise CatalogSchemaError(f"field {name} needs a minpoly")
    expr = parse_formula(minpoly, [name])
    if "x" in {s.name for s in expr.free_symbols}:
        raise CatalogSchemaError("minpoly must be written in the generator")
    coeffs = SympyPoly(expr, Symbol(name)).all_coeffs()
    low_first = tuple(Fraction(int(c.p), int(c.q)) for c in reversed(coeffs))
    return ExactField.from_spec(NumberFieldSpec(generator=name, minpoly=low_first))


def _radicals(text: Optional[str]) -> List[Tuple[str, str]]:
    radicals = []
    for chunk in (text or "").split(";"):
        if not chunk.strip():
            continue
        name, sep, formula = chunk.partition("=")
        if not sep or not _IDENTIFIER.fullmatch(name.strip()):
            raise CatalogSchemaError(f"cannot read radical declaration {chunk.strip()!r}")
        radicals.append((name.strip(), formula.strip()))
    return radicals


def _samples(text: Optional[str]) -> Dict[str, List[Fraction]]:
    """``b=1/3,2/5,5/7; c=3/4,5/6,9/7``."""
    samples: Dict[str, List[Fraction]] = {}
    for chunk in (text or "").split(";"):
        if not chunk.strip():
            continue
        name, sep, values = chunk.partition("=")
        if not sep:
            raise CatalogSchemaError(f"cannot read samples {chunk.strip()!r}")
        try:
            samples[name.strip()] = [Fraction(v.strip()) for v in values.split(",") if v.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise CatalogSchemaError(f"bad sample value in {chunk.strip()!r}") from exc
    return samples


catalog_loader = CatalogLoader()


def load_catalog(path: Union[str, Path, None] = None) -> List[CatalogEntry]:
    return catalog_loader.load(path)
