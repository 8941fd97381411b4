"""
Rumin Currents Toolkit - command-line entry point

Weight tables and exact verification of the Rumin complex of a Carnot
algebra, flat norms of discrete Rumin currents, and the compactness probe.
Results go to stdout; logs and errors go to stderr.
"""
import argparse
import logging
import sys
from typing import List, Optional

from app.cli.commands import compactness, flatnorm, verify
from app.cli.commands import complex as complex_table
from app.core.config import settings
from app.core.errors import AlgebraValidationError, RuminToolkitError
from app.core.logging import configure_logging

logger = logging.getLogger(__name__)

COMMANDS = {module.NAME: module for module in (complex_table, verify, flatnorm, compactness)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rumin",
        description=f"{settings.PROJECT_NAME}: Rumin complexes and Rumin currents on Carnot groups",
    )
    parser.add_argument("--log-level", default=None, help=f"logging level (default {settings.LOG_LEVEL})")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS.values():
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    logger.info("running %s (environment %s)", args.command, settings.ENVIRONMENT)

    try:
        return COMMANDS[args.command].run(args)
    except AlgebraValidationError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        for failure in exc.report.failures:
            print(f"  {failure.axiom}: {failure.detail}", file=sys.stderr)
        return exc.exit_code
    except RuminToolkitError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
