"""
Pydantic schemas shared by the algebra, services, catalog and CLI layers.
"""
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# Field Schemas
class NumberFieldSpec(BaseModel):
    """A simple extension Q(alpha) given by a monic minimal polynomial, coefficients low first."""
    model_config = ConfigDict(frozen=True)

    generator: str = "t"
    minpoly: Tuple[Fraction, ...] = (Fraction(0), Fraction(1))

    @field_validator("minpoly")
    @classmethod
    def _monic(cls, value: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
        if len(value) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        if value[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        return value

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1


# Exponent Schemas
PARAMETER_NAMES = ("p", "q", "r")


class AffineForm(BaseModel):
    """u + v*p + w*q + z*r in up to three free parameters p, q, r."""
    model_config = ConfigDict(frozen=True)

    u: Fraction = Fraction(0)
    v: Fraction = Fraction(0)
    w: Fraction = Fraction(0)
    z: Fraction = Fraction(0)

    @property
    def slopes(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.v, self.w, self.z)

    @property
    def is_constant(self) -> bool:
        return not any(self.slopes)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(u=self.u + other.u, v=self.v + other.v, w=self.w + other.w, z=self.z + other.z)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + other.scale(-1)

    def scale(self, k) -> "AffineForm":
        return AffineForm(u=self.u * k, v=self.v * k, w=self.w * k, z=self.z * k)

    def is_one(self) -> bool:
        return self.is_constant and self.u == 1

    def __str__(self) -> str:
        chunks = []
        for slope, name in zip(self.slopes, PARAMETER_NAMES):
            if slope == 0:
                continue
            if slope == 1:
                text = name
            elif slope == -1:
                text = f"-{name}"
            else:
                text = f"{slope}{name}"
            if chunks and not text.startswith("-"):
                text = "+" + text
            chunks.append(text)
        if not chunks:
            return str(self.u)
        if self.u:
            sign = "+" if self.u > 0 else "-"
            chunks.append(f"{sign}{abs(self.u)}")
        return "".join(chunks)

    @classmethod
    def parse(cls, text: str) -> "AffineForm":
        """Parse forms like ``1/3``, ``p``, ``2p``, ``1/2p``, ``p+1/3``, ``q``."""
        text = text.replace(" ", "").replace("−", "-")
        if not any(name in text for name in PARAMETER_NAMES):
            return cls(u=Fraction(text))
        values = {"u": Fraction(0), "v": Fraction(0), "w": Fraction(0), "z": Fraction(0)}
        for sign, chunk in _signed_chunks(text):
            name = chunk[-1]
            if name in PARAMETER_NAMES:
                body = chunk[:-1].rstrip("*")
                key = "vwz"[PARAMETER_NAMES.index(name)]
                values[key] += sign * (Fraction(body) if body else Fraction(1))
            else:
                values["u"] += sign * Fraction(chunk)
        return cls(**values)


def _signed_chunks(text: str):
    chunk, sign = "", 1
    for i, ch in enumerate(text):
        if ch in "+-" and i > 0 and text[i - 1] not in "/*":
            if chunk:
                yield sign, chunk
            chunk, sign = "", (1 if ch == "+" else -1)
        elif ch == "-" and i == 0:
            sign = -1
        else:
            chunk += ch
    if chunk:
        yield sign, chunk


class ExponentTriple(BaseModel):
    """Local exponent differences at three points, written e.g. (1/2,1/3,p)."""
    model_config = ConfigDict(frozen=True)

    entries: Tuple[AffineForm, AffineForm, AffineForm]

    @classmethod
    def of(cls, *values) -> "ExponentTriple":
        forms = []
        for value in values:
            if isinstance(value, AffineForm):
                forms.append(value)
            elif isinstance(value, str):
                forms.append(AffineForm.parse(value))
            else:
                forms.append(AffineForm(u=Fraction(value)))
        return cls(entries=tuple(forms))

    @classmethod
    def parse(cls, text: str) -> "ExponentTriple":
        body = text.strip().lstrip("(").rstrip(")")
        parts = [p for p in body.split(",") if p.strip()]
        if len(parts) != 3:
            raise ValueError(f"expected three exponent differences in {text!r}")
        return cls.of(*[p.strip() for p in parts])

    @property
    def is_constant(self) -> bool:
        return all(e.is_constant for e in self.entries)

    def sorted_key(self) -> Tuple:
        return tuple(sorted((e.slopes, e.u) for e in self.entries))

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"


# Ramification Schemas
class BranchingPattern(BaseModel):
    """Three partitions of the degree: the fibers over 0, 1 and infinity."""
    model_config = ConfigDict(frozen=True)

    degree: int
    fibers: Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]

    @model_validator(mode="after")
    def _fibers_sum_to_degree(self) -> "BranchingPattern":
        for fiber in self.fibers:
            if sum(fiber) != self.degree or any(part <= 0 for part in fiber):
                raise ValueError(f"fiber {fiber} is not a partition of {self.degree}")
        return self

    @classmethod
    def of(cls, *fibers) -> "BranchingPattern":
        normalized = tuple(tuple(sorted(f, reverse=True)) for f in fibers)
        return cls(degree=sum(normalized[0]), fibers=normalized)

    @property
    def part_count(self) -> int:
        return sum(len(f) for f in self.fibers)

    def canonical(self) -> "BranchingPattern":
        return BranchingPattern.of(*self.fibers)

    def __str__(self) -> str:
        return "=".join("+".join(str(p) for p in fiber) for fiber in self.fibers)


class OutsidePoint(BaseModel):
    """A block of critical points that do not lie above 0, 1 or infinity."""
    locus: str
    points: int
    multiplicity: int


class RamificationReport(BaseModel):
    """Branching data of a covering."""
    pattern: BranchingPattern
    outside: List[OutsidePoint] = Field(default_factory=list)
    hurwitz_defect: int = 0

    @property
    def is_belyi(self) -> bool:
        return not self.outside


# Classification Schemas
class RestrictionQuery(BaseModel):
    """Denominators k_j of the restricted exponent differences 1/k_j."""
    denominators: Tuple[int, ...] = ()
    degree_bound: int = 10

    @field_validator("denominators")
    @classmethod
    def _at_most_three(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(value) > 3 or any(k < 1 for k in value):
            raise ValueError("at most three positive denominators")
        return tuple(sorted(value))

    @property
    def N(self) -> int:
        return len(self.denominators)

    @property
    def non_logarithmic_flags(self) -> Tuple[bool, ...]:
        return tuple(k == 1 for k in self.denominators)


class CandidateStatus(str, Enum):
    """Existence status of a covering for a candidate pattern."""
    COVERING_KNOWN = "covering-known"
    NO_COVERING = "no-covering"
    UNDECIDED = "undecided"


class Candidate(BaseModel):
    """One admissible transformation: triples, degree and branching patterns."""
    below: ExponentTriple
    above: ExponentTriple
    degree: int
    patterns: List[BranchingPattern]
    outside: Tuple[int, ...] = ()
    status: CandidateStatus = CandidateStatus.UNDECIDED
    source: Optional[str] = None


class DihedralParams(BaseModel):
    """Integers (k, l, m, n) of the dihedral covering family."""
    k: int
    l: int
    m: int
    n: int

    @model_validator(mode="after")
    def _ranges(self) -> "DihedralParams":
        if self.k < 2 or self.l < 1 or self.m < 0 or self.n < 0:
            raise ValueError("need k >= 2, l >= 1, m, n >= 0")
        return self


# Verification Schemas
class CheckVerdict(str, Enum):
    """Outcome of a single verification check."""
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


class CheckResult(BaseModel):
    """A named check with its verdict and a short detail message."""
    name: str
    verdict: CheckVerdict
    detail: str = ""


class Certificate(BaseModel):
    """Everything that was checked for one catalog entry."""
    entry_id: str
    order: int = 0
    samples: List[str] = Field(default_factory=list)
    report: Optional[RamificationReport] = None
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def verdict(self) -> CheckVerdict:
        if any(c.verdict == CheckVerdict.FAIL for c in self.checks):
            return CheckVerdict.FAIL
        if self.checks and all(c.verdict == CheckVerdict.SKIP for c in self.checks):
            return CheckVerdict.SKIP
        return CheckVerdict.PASS

    def merge(self, other: "Certificate") -> "Certificate":
        return Certificate(
            entry_id=self.entry_id,
            order=max(self.order, other.order),
            samples=self.samples or other.samples,
            report=self.report or other.report,
            checks=self.checks + other.checks,
        )


class VerificationSummary(BaseModel):
    """Aggregated result of a verification run."""
    certificates: List[Certificate]

    @property
    def failed(self) -> List[str]:
        return [c.entry_id for c in self.certificates if c.verdict == CheckVerdict.FAIL]

    @property
    def passed(self) -> int:
        return sum(1 for c in self.certificates if c.verdict == CheckVerdict.PASS)


# Catalog Schemas
class CatalogRecord(BaseModel):
    """Raw key/value block of the catalog file, before algebraic parsing."""
    id: str
    entry_class: str
    line: int
    field: str = "Q"
    minpoly: Optional[str] = None
    below: Optional[str] = None
    above: Optional[str] = None
    degree: Optional[int] = None
    pattern: Optional[str] = None
    phi: str
    theta: Optional[str] = None
    tilde: Optional[str] = None
    params: Optional[str] = None
    rhs: Optional[str] = None
    substitution: Optional[str] = None
    composition: Optional[str] = None
    coxeter: Optional[bool] = None
    samples: Optional[str] = None
    radicals: Optional[str] = None
