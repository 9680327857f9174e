"""
Pull-back of the hypergeometric equation and the parametric covering families.
"""
import logging

from app.algebra.expressions import FormulaEvaluator
from app.algebra.fields import ExactField
from app.algebra.series import HpgParams
from app.commands import EXIT_OK, EXIT_USAGE, add_field_arguments, field_from_args, render_table
from app.core.errors import RecognitionError
from app.schemas.schemas import DihedralParams
from app.services.families import (
    CurveTag,
    IsogenyMap,
    cyclic_identity,
    dihedral_identity,
    dihedral_variant,
    gfdih_covering,
    gfdih_expected_pattern,
    isogeny_covering,
    pade_covering,
)
from app.services.pullback import classify_singularities, hpg_operator, pullback_ode, recognize_hypergeometric
from app.services.ramification import analyze_covering


logger = logging.getLogger(__name__)

FAMILIES = ("cyclic", "pade", "dihedral", "gfdih", "isogeny")


def register(subparsers) -> None:
    parser = subparsers.add_parser("pullback", help="pull back the hypergeometric equation along phi")
    parser.add_argument("--params", required=True, help="A,B,C of 2F1(A,B;C;z)")
    parser.add_argument("--phi", required=True, help="rational function of x")
    parser.add_argument("--theta", help="radical prefactor, e.g. (1-x)^(-1/2)")
    parser.add_argument("--parameter", help="work over Q(name) with a free parameter")
    add_field_arguments(parser)
    parser.set_defaults(handler=run_pullback)

    parser = subparsers.add_parser("family", help="members of the parametric covering families")
    parser.add_argument("kind", choices=FAMILIES)
    parser.add_argument("--degree", type=int, help="degree d of the cyclic or dihedral covering")
    parser.add_argument("--variant", action="store_true", help="the second dihedral covering")
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument("--l", type=int, default=1)
    parser.add_argument("--m", type=int, default=0)
    parser.add_argument("--n", type=int, default=0)
    parser.add_argument("--curve", choices=[tag.value for tag in CurveTag], default=CurveTag.E1.value)
    parser.add_argument("--psi", help="x-coordinate map of the endomorphism")
    parser.add_argument("--label", help="the endomorphism as an element of Z[i] or Z[omega]")
    add_field_arguments(parser)
    parser.set_defaults(handler=run_family)


def _working_field(args) -> ExactField:
    if args.parameter:
        return ExactField.parameter_field(args.parameter)
    return field_from_args(args)


def run_pullback(args) -> int:
    field = _working_field(args)
    evaluator = FormulaEvaluator.for_field(field)
    values = evaluator.constants_list(args.params)
    if len(values) != 3:
        print(f"expected three parameters, got {len(values)}")
        return EXIT_USAGE
    params = HpgParams(field, *values)
    phi = evaluator.ratfunc(args.phi)
    theta = evaluator.radical_factor(args.theta) if args.theta else None

    ode = pullback_ode(hpg_operator(params), phi, theta)
    print(f"equation: {ode.show()}")
    render_table(
        ("point", "exponents", "kind"),
        [(p.show_location(), p.show_exponents(), p.kind.value) for p in classify_singularities(ode)],
    )
    try:
        recognized = recognize_hypergeometric(ode)
    except RecognitionError as exc:
        print(f"not hypergeometric: {exc.message}")
        return EXIT_OK
    if recognized is None:
        print("not hypergeometric")
        return EXIT_OK
    mu, found = recognized
    print(f"moebius:  {mu.show()}")
    print(f"params:   {found.show()}")
    return EXIT_OK


def run_family(args) -> int:
    kind = args.kind
    if kind in ("cyclic", "dihedral") and args.degree is None:
        print(f"family {kind} needs --degree")
        return EXIT_USAGE

    identity = None
    if kind == "cyclic":
        identity = cyclic_identity(args.degree)
        phi = identity.phi
    elif kind == "dihedral" and args.variant:
        phi = dihedral_variant(args.degree)
    elif kind == "dihedral":
        identity = dihedral_identity(args.degree)
        phi = identity.phi
    elif kind == "pade":
        phi = pade_covering(args.k, args.l, args.m, args.n).phi
    elif kind == "gfdih":
        params = DihedralParams(k=args.k, l=args.l, m=args.m, n=args.n)
        phi = gfdih_covering(params)
        print(f"expected: {gfdih_expected_pattern(params)}")
    else:
        if not (args.psi and args.label):
            print("family isogeny needs --psi and --label")
            return EXIT_USAGE
        field = field_from_args(args)
        psi = FormulaEvaluator.for_field(field).ratfunc(args.psi)
        phi = isogeny_covering(IsogenyMap(CurveTag(args.curve), psi, args.label))

    report = analyze_covering(phi)
    print(f"phi:      {phi.show()}")
    print(f"degree:   {phi.degree}")
    print(f"pattern:  {report.pattern}")
    if identity is not None:
        print(f"identity: {identity.show()}")
    logger.debug("family %s produced a degree %d covering", kind, phi.degree)
    return EXIT_OK
