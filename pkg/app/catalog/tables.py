"""
Fixed registry of the printed classification tables.

Rows are never created dynamically. The enumerator reads recorded
statuses from here, and the CLI compares its own enumeration against it.
"""
import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional

from app.schemas.schemas import AffineForm, BranchingPattern, CandidateStatus, ExponentTriple
from app.services.ramification import parse_pattern


logger = logging.getLogger(__name__)


class TableName(str, Enum):
    """Printed tables known to the registry."""
    ONE_PARAMETER = "one-parameter"
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    RECORDED = "recorded"


class EndomorphismRing(str, Enum):
    """Rings of integers whose norms give the degrees of elliptic self-maps."""
    GAUSSIAN = "gaussian"
    EISENSTEIN = "eisenstein"


class TableRow:
    """A single printed row with its recorded covering data."""

    def __init__(
        self,
        table: TableName,
        below: str,
        above: str,
        degree: str,
        pattern: Optional[str] = None,
        composition: Optional[str] = None,
        coxeter: Optional[bool] = None,
        status: CandidateStatus = CandidateStatus.COVERING_KNOWN,
        ring: Optional[EndomorphismRing] = None,
        quadratic_factor: int = 1,
    ):
        self.table = table
        self.below = ExponentTriple.parse(below)
        self.above = ExponentTriple.parse(above)
        self.degree_text = degree
        self.degree_form = AffineForm.parse(degree.replace("n", "p"))
        self.pattern = pattern
        self.composition = composition
        self.coxeter = coxeter
        self.status = status
        self.ring = ring
        self.quadratic_factor = quadratic_factor

    @property
    def is_template(self) -> bool:
        return not self.degree_form.is_constant

    def degree_at(self, n: int) -> int:
        value = self.degree_form.u + self.degree_form.v * n
        return int(value)

    def instance_of(self, degree: int) -> Optional[int]:
        """The n >= 1 with degree_at(n) == degree, or None (0 for fixed rows)."""
        form = self.degree_form
        if form.is_constant:
            return 0 if form.u == degree else None
        n = (Fraction(degree) - form.u) / form.v
        if n.denominator != 1 or n < 1:
            return None
        return int(n)

    def matches(self, below: ExponentTriple, above: ExponentTriple, degree: int) -> bool:
        return (
            self.below.sorted_key() == below.sorted_key()
            and self.above.sorted_key() == above.sorted_key()
            and self.instance_of(degree) is not None
        )


def _one(*args, **kwargs) -> TableRow:
    return TableRow(TableName.ONE_PARAMETER, *args, **kwargs)


def _elliptic(*args, **kwargs) -> TableRow:
    return TableRow(TableName.ELLIPTIC, *args, **kwargs)


def _hyperbolic(*args, **kwargs) -> TableRow:
    return TableRow(TableName.HYPERBOLIC, *args, **kwargs)


NO = CandidateStatus.NO_COVERING
GAUSSIAN = EndomorphismRing.GAUSSIAN
EISENSTEIN = EndomorphismRing.EISENSTEIN


TABLES: Dict[TableName, List[TableRow]] = {
    # One free exponent difference p
    TableName.ONE_PARAMETER: [
        _one("(1/2,1/3,p)", "(1/2,p,2p)", "3", "2+1=3=2+1", "indecomposable"),
        _one("(1/2,1/3,p)", "(1/3,p,3p)", "4", "2+2=3+1=3+1", "indecomposable"),
        _one("(1/2,1/3,p)", "(1/3,2p,2p)", "4", "2+2=3+1=2+2", status=NO),
        _one("(1/2,1/3,p)", "(p,p,4p)", "6", "2+2+2=3+3=4+1+1", "2x3"),
        _one("(1/2,1/3,p)", "(2p,2p,2p)", "6", "2+2+2=3+3=2+2+2", "2x3 or 3x2"),
        _one("(1/2,1/3,p)", "(p,2p,3p)", "6", "2+2+2=3+3=3+2+1", status=NO),
        _one("(1/2,1/4,p)", "(p,p,2p)", "4", "2+2=4=2+1+1", "2x2"),
        _one("(1/3,1/3,p)", "(p,p,p)", "3", "3=3=1+1+1", "indecomposable"),
    ],
    # Self-maps and quotients of the elliptic integrals, degree templates in n
    TableName.ELLIPTIC: [
        _elliptic("(1/2,1/4,1/4)", "(1/2,1/4,1/4)", "4n", "2n*2=n*4=(n-1)*4+2+1+1", ring=GAUSSIAN),
        _elliptic("(1/2,1/4,1/4)", "(1/2,1/4,1/4)", "4n+1", "2n*2+1=n*4+1=n*4+1", ring=GAUSSIAN),
        _elliptic("(1/2,1/4,1/4)", "(1/2,1/4,1/4)", "4n+2", "(2n+1)*2=n*4+2=n*4+1+1", ring=GAUSSIAN),
        _elliptic("(1/2,1/3,1/6)", "(1/2,1/3,1/6)", "6n", "3n*2=2n*3=(n-1)*6+3+2+1", ring=EISENSTEIN),
        _elliptic("(1/2,1/3,1/6)", "(1/2,1/3,1/6)", "6n+1", "3n*2+1=2n*3+1=n*6+1", ring=EISENSTEIN),
        _elliptic("(1/2,1/3,1/6)", "(1/2,1/3,1/6)", "6n+3", "(3n+1)*2+1=(2n+1)*3=n*6+2+1", ring=EISENSTEIN),
        _elliptic("(1/2,1/3,1/6)", "(1/2,1/3,1/6)", "6n+4", "(3n+2)*2=(2n+1)*3+1=n*6+3+1", ring=EISENSTEIN),
        _elliptic("(1/2,1/3,1/6)", "(1/3,1/3,1/3)", "6n", "3n*2=2n*3=(n-1)*6+2+2+2",
                  ring=EISENSTEIN, quadratic_factor=2),
        _elliptic("(1/2,1/3,1/6)", "(1/3,1/3,1/3)", "6n", "3n*2=(2n-1)*3+1+1+1=n*6",
                  ring=EISENSTEIN, quadratic_factor=2),
        _elliptic("(1/2,1/3,1/6)", "(1/3,1/3,1/3)", "6n+2", "(3n+1)*2=2n*3+1+1=n*6+2",
                  ring=EISENSTEIN, quadratic_factor=2),
        _elliptic("(1/2,1/3,1/6)", "(1/3,1/3,1/3)", "6n+4", "(3n+2)*2=(2n+1)*3+1=n*6+2+2",
                  ring=EISENSTEIN, quadratic_factor=2),
        _elliptic("(1/2,1/3,1/6)", "(2/3,1/6,1/6)", "6n", "3n*2=2n*3=(n-1)*6+4+1+1",
                  ring=EISENSTEIN, quadratic_factor=2),
        _elliptic("(1/2,1/3,1/6)", "(2/3,1/6,1/6)", "6n+2", "(3n+1)*2=2n*3+2=n*6+1+1",
                  ring=EISENSTEIN, quadratic_factor=2),
        _elliptic("(1/3,1/3,1/3)", "(1/3,1/3,1/3)", "3n", "n*3=n*3=(n-1)*3+1+1+1", ring=EISENSTEIN),
        _elliptic("(1/3,1/3,1/3)", "(1/3,1/3,1/3)", "3n+1", "n*3+1=n*3+1=n*3+1", ring=EISENSTEIN),
    ],
    # Hyperbolic triangle groups
    TableName.HYPERBOLIC: [
        _hyperbolic("(1/2,1/3,1/7)", "(1/3,1/3,1/7)", "8", composition="indecomposable", coxeter=False),
        _hyperbolic("(1/2,1/3,1/7)", "(1/2,1/7,1/7)", "9", composition="indecomposable", coxeter=False),
        _hyperbolic("(1/2,1/3,1/7)", "(1/3,1/7,2/7)", "10", composition="indecomposable", coxeter=True),
        _hyperbolic("(1/2,1/3,1/7)", "(1/7,1/7,3/7)", "12", status=NO),
        _hyperbolic("(1/2,1/3,1/7)", "(1/7,2/7,2/7)", "12", status=NO),
        _hyperbolic("(1/2,1/3,1/7)", "(1/3,1/7,1/7)", "16", status=NO),
        _hyperbolic("(1/2,1/3,1/7)", "(1/7,1/7,2/7)", "18", composition="2x9", coxeter=False),
        _hyperbolic("(1/2,1/3,1/7)", "(1/7,1/7,1/7)", "24", composition="3x8", coxeter=True),
        _hyperbolic("(1/2,1/3,1/8)", "(1/3,1/8,1/8)", "10", composition="indecomposable", coxeter=False),
        _hyperbolic("(1/2,1/3,1/8)", "(1/4,1/8,1/8)", "12", composition="2x2x3", coxeter=True),
        _hyperbolic("(1/2,1/3,1/9)", "(1/9,1/9,1/9)", "12", composition="3x4", coxeter=False),
        _hyperbolic("(1/2,1/4,1/5)", "(1/4,1/4,1/5)", "6", composition="indecomposable", coxeter=False),
        _hyperbolic("(1/2,1/4,1/5)", "(1/5,1/5,1/5)", "8", status=NO),
    ],
    # Facts stated without a printed computation
    TableName.RECORDED: [
        TableRow(
            TableName.RECORDED, "(1/2,1/2,1/2)", "(2,2,2)", "10",
            "2+2+2+2+2=2+2+2+2+2=2+2+2+2+2", status=NO,
        ),
    ],
}


def get_table(name: TableName) -> List[TableRow]:
    """Rows of one table."""
    return TABLES[TableName(name)]


def all_rows() -> List[TableRow]:
    return [row for rows in TABLES.values() for row in rows]


def find_rows(
    below: ExponentTriple,
    above: ExponentTriple,
    degree: int,
    pattern: Optional[BranchingPattern] = None,
) -> List[TableRow]:
    """Rows recorded for a candidate; rows without a printed pattern match any pattern."""
    found = []
    for row in all_rows():
        if not row.matches(below, above, degree):
            continue
        if pattern is not None and row.pattern is not None and not _same_pattern(row, pattern, degree):
            continue
        found.append(row)
    return found


def _same_pattern(row: TableRow, pattern: BranchingPattern, degree: int) -> bool:
    n = row.instance_of(degree) if row.is_template else None
    return parse_pattern(row.pattern, n).fibers == pattern.fibers


def count_rows(name: TableName) -> int:
    return len(get_table(name))
