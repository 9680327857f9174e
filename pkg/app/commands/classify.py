"""
Classification commands: enumerate, analyze, solve.
"""
import logging

from app.commands import (
    EXIT_OK,
    add_field_arguments,
    emit_json,
    emit_records,
    field_from_args,
    parse_integers,
    parse_ratfunc,
    render_table,
)
from app.core.config import settings
from app.schemas.schemas import RestrictionQuery
from app.services.classification import enumerate_candidates, enumerate_parametric, hyperbolic_candidates
from app.services.ramification import analyze_covering, hurwitz_part_count, parse_pattern
from app.services.solver import CoveringSolver


logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("enumerate", help="list admissible pull-back transformations")
    parser.add_argument("--restrict", default="", help="denominators k of the restricted differences 1/k, e.g. 2,3")
    parser.add_argument("--max-degree", type=int, default=6, help="largest covering degree")
    parser.add_argument("--hyperbolic", action="store_true", help="enumerate the hyperbolic triangle cases")
    parser.add_argument("--parametric", action="store_true", help="instantiate the elliptic self-map families")
    parser.add_argument("--format", choices=("table", "records"), default="table")
    parser.set_defaults(handler=run_enumerate)

    parser = subparsers.add_parser("analyze", help="branching pattern of a rational covering")
    parser.add_argument("--phi", required=True, help="rational function of x")
    parser.add_argument("--format", choices=("table", "records"), default="table")
    add_field_arguments(parser)
    parser.set_defaults(handler=run_analyze)

    parser = subparsers.add_parser("solve", help="compute coverings with a branching pattern")
    parser.add_argument("--pattern", required=True, help="fibers over 0, 1, infinity, e.g. 2+1=3=2+1")
    parser.add_argument("--max-degree", type=int, default=None, help="solver degree bound")
    add_field_arguments(parser)
    parser.set_defaults(handler=run_solve)


def run_enumerate(args) -> int:
    if args.hyperbolic:
        candidates = hyperbolic_candidates()
    elif args.parametric:
        candidates = enumerate_parametric()
    else:
        query = RestrictionQuery(denominators=tuple(parse_integers(args.restrict)), degree_bound=args.max_degree)
        candidates = enumerate_candidates(query)

    rows = [
        (str(c.below), str(c.above), c.degree, " | ".join(str(p) for p in c.patterns), c.status.value)
        for c in candidates
    ]
    if args.format == "records":
        for below, above, degree, patterns, status in rows:
            emit_json({"below": below, "above": above, "degree": degree, "pattern": patterns, "status": status})
    else:
        render_table(("below", "above", "degree", "pattern", "status"), rows)
    logger.info("enumerated %d candidates", len(rows))
    return EXIT_OK


def run_analyze(args) -> int:
    field = field_from_args(args)
    phi = parse_ratfunc(args.phi, field)
    report = analyze_covering(phi)
    if args.format == "records":
        emit_records([report])
        return EXIT_OK
    print(f"degree:   {report.pattern.degree}")
    print(f"pattern:  {report.pattern}")
    print(f"hurwitz:  {'ok' if hurwitz_part_count(report.pattern) else 'defect ' + str(report.hurwitz_defect)}")
    if report.outside:
        render_table(
            ("outside locus", "points", "multiplicity"),
            [(p.locus, p.points, p.multiplicity) for p in report.outside],
        )
    return EXIT_OK


def run_solve(args) -> int:
    field = field_from_args(args)
    pattern = parse_pattern(args.pattern)
    hint = field.spec if field.is_algebraic else None
    limit = args.max_degree if args.max_degree is not None else settings.HPG_MAX_SOLVER_DEGREE
    coverings = CoveringSolver(max_degree=limit).solve_covering(pattern, hint)
    if not coverings:
        print(f"no covering with pattern {pattern}")
    for phi in coverings:
        print(f"{phi.field.name}: {phi.show()}")
    return EXIT_OK
