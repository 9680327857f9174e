"""
Command line entry point.
"""
import argparse
import logging
import sys
from typing import List, Optional

from app.commands import EXIT_USAGE, classify, transforms, verify
from app.core.errors import HpgError
from app.core.logging import setup_logging


logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpgtrans",
        description="Exact pull-back transformations of the Gauss hypergeometric equation",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (classify, transforms, verify):
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except HpgError as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error {exc}", file=sys.stderr)
        return exc.exit_status
