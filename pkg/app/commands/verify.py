"""
Catalog certification and listing.
"""
import logging
from typing import List

from app.catalog.loader import CatalogEntry, load_catalog
from app.commands import EXIT_FAILURE, EXIT_OK, emit_records, render_table
from app.core.config import parse_samples, settings
from app.schemas.schemas import CheckVerdict, VerificationSummary
from app.services.verification import MUTATION_SEED, VerificationEngine, sample_mutants, select_entries


logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="certify catalog entries")
    parser.add_argument("catalog", nargs="?", help="catalog file (default: the shipped catalog)")
    parser.add_argument("--order", type=int, default=None, help="compare coefficients 0..order")
    parser.add_argument("--samples", default=None, help="values of a sampled second parameter, e.g. 1/5,3/7,-2/9")
    parser.add_argument("--class", dest="classes", action="append", default=[], help="restrict to an entry class")
    parser.add_argument("--id", dest="ids", action="append", default=[], help="restrict to an entry id")
    parser.add_argument("--jobs", type=int, default=None, help="worker threads")
    parser.add_argument("--format", choices=("table", "records"), default="table")
    parser.add_argument(
        "--mutate", type=int, default=0, metavar="N",
        help="add 1 at one random site of N sampled entries and expect every mutant to fail",
    )
    parser.add_argument("--seed", type=int, default=MUTATION_SEED, help="seed for choosing mutated entries and sites")
    parser.set_defaults(handler=run_verify)

    parser = subparsers.add_parser("catalog", help="inspect the catalog")
    actions = parser.add_subparsers(dest="action", required=True)
    listing = actions.add_parser("list", help="list catalog entries")
    listing.add_argument("catalog", nargs="?", help="catalog file (default: the shipped catalog)")
    listing.add_argument("--class", dest="classes", action="append", default=[], help="restrict to an entry class")
    listing.set_defaults(handler=run_catalog_list)


def _report(summary: VerificationSummary, fmt: str) -> None:
    if fmt == "records":
        emit_records(summary.certificates)
        return
    rows = []
    for cert in summary.certificates:
        failing = [f"{c.name}: {c.detail}" for c in cert.checks if c.verdict == CheckVerdict.FAIL]
        rows.append((cert.entry_id, cert.verdict.value, len(cert.checks), "; ".join(failing)))
    render_table(("id", "verdict", "checks", "failures"), rows)
    print(f"{summary.passed} passed, {len(summary.failed)} failed, {len(summary.certificates)} total")


def run_verify(args) -> int:
    catalog = load_catalog(args.catalog or settings.HPG_CATALOG)
    samples = parse_samples(args.samples) if args.samples else None
    engine = VerificationEngine(catalog, order=args.order, samples=samples)
    selected = select_entries(catalog, args.classes, args.ids)
    if not selected:
        print("no catalog entries selected")
        return EXIT_FAILURE

    if args.mutate:
        return _run_mutants(engine, selected, args)

    summary = engine.verify_all(selected, jobs=args.jobs)
    _report(summary, args.format)
    return EXIT_FAILURE if summary.failed else EXIT_OK


def _run_mutants(engine: VerificationEngine, entries: List[CatalogEntry], args) -> int:
    mutants = sample_mutants(entries, args.mutate, engine.order, seed=args.seed)
    summary = engine.verify_all(mutants, jobs=args.jobs)
    _report(summary, args.format)
    survived = [c.entry_id for c in summary.certificates if c.verdict != CheckVerdict.FAIL]
    if survived:
        logger.error("mutants not rejected: %s", ", ".join(survived))
        print(f"mutants not rejected: {', '.join(survived)}")
        return EXIT_FAILURE
    print(f"all {len(mutants)} mutants rejected")
    return EXIT_OK


def run_catalog_list(args) -> int:
    catalog = select_entries(load_catalog(args.catalog or settings.HPG_CATALOG), args.classes)
    rows = [
        (
            entry.id,
            entry.entry_class,
            entry.field.name,
            entry.record.degree if entry.record.degree is not None else "",
            entry.record.pattern or "",
        )
        for entry in catalog
    ]
    render_table(("id", "class", "field", "degree", "pattern"), rows)
    return EXIT_OK
