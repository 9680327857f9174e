"""
Command groups of the command line front end.

Each module exposes ``register(subparsers)`` which adds its subcommands and
binds a handler returning the process exit status.
"""
import json
import sys
from typing import Iterable, List, Optional, Sequence, TextIO

from pydantic import BaseModel

from app.algebra.expressions import FormulaEvaluator
from app.algebra.fields import ExactField
from app.algebra.polys import RatFunc
from app.catalog.loader import number_field


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def render_table(headers: Sequence[str], rows: Iterable[Sequence[object]], out: Optional[TextIO] = None) -> None:
    """Print rows as left-aligned columns."""
    out = out or sys.stdout
    cells: List[List[str]] = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    for index, row in enumerate(cells):
        out.write("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() + "\n")
        if index == 0:
            out.write("  ".join("-" * width for width in widths) + "\n")


def emit_records(records: Iterable[BaseModel], out: Optional[TextIO] = None) -> None:
    """One JSON object per line."""
    out = out or sys.stdout
    for record in records:
        out.write(record.model_dump_json() + "\n")


def emit_json(payload: dict, out: Optional[TextIO] = None) -> None:
    (out or sys.stdout).write(json.dumps(payload, sort_keys=True) + "\n")


def add_field_arguments(parser) -> None:
    parser.add_argument("--field", default="Q", help="coefficient field: Q or a generator name")
    parser.add_argument("--minpoly", help="minimal polynomial of the generator, e.g. w^2+w+1")


def field_from_args(args) -> ExactField:
    return number_field(args.field, args.minpoly)


def parse_ratfunc(text: str, field: ExactField) -> RatFunc:
    return FormulaEvaluator.for_field(field).ratfunc(text)


def parse_integers(text: str) -> List[int]:
    """``2,3`` -> [2, 3]; an empty string gives []."""
    return [int(chunk) for chunk in text.replace(" ", "").split(",") if chunk]
