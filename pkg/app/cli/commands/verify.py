"""
verify: exact structural checks of the Rumin complex
"""
import argparse

from app.cli.deps import common_options, get_complex, resolve_algebra
from app.cli.output import emit, render_table
from app.core.errors import EXIT_OK, VerificationError
from app.rumin.verify import CHECKS, verify_complex

NAME = "verify"


def _status(passed) -> str:
    if passed is None:
        return "n/a"
    return "pass" if passed else "FAIL"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[common_options()],
        help="check d_c^2 = 0, projector identities, the delta bound and the rest",
    )
    parser.add_argument("source", nargs="?", help="catalog name or algebra JSON file")
    parser.add_argument("--only", action="append", choices=sorted(CHECKS), help="run only this check (repeatable)")


def run(args: argparse.Namespace) -> int:
    rc = get_complex(resolve_algebra(args), args)
    report = verify_complex(rc, args.only)

    header = ["check", "passed", "detail", "offending"]
    rows = [
        [c.name, "" if c.passed is None else str(c.passed).lower(), c.detail, ";".join(c.offending)]
        for c in report.checks
    ]

    def pretty() -> str:
        table = render_table(["check", "status", "detail"], [
            [c.name, _status(c.passed), c.detail or (", ".join(c.offending[:5]))]
            for c in report.checks
        ])
        verdict = "all checks passed" if report.passed else f"{len(report.failed())} check(s) failed"
        return f"{report.algebra}: {verdict}\n{table}"

    emit(report, args.format, header, rows, pretty)
    if not report.passed:
        raise VerificationError(
            f"{len(report.failed())} check(s) failed: {', '.join(c.name for c in report.failed())}", report
        )
    return EXIT_OK
