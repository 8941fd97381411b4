"""
complex: weight and order table of the Rumin complex
"""
import argparse

from app.cli.deps import common_options, resolve_algebra
from app.cli.output import emit, join, render_table
from app.core.errors import EXIT_OK
from app.opalg.operators import format_operator
from app.rumin.complex import RuminComplex, build_rumin_complex
from app.rumin.verify import verify_complex
from app.schemas.report import ComplexReport, DegreeReport

NAME = "complex"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[common_options()],
        help="per-degree dims, weights and d_c orders",
    )
    parser.add_argument("source", nargs="?", help="catalog name or algebra JSON file")


def complex_report(rc: RuminComplex, with_operators: bool = False) -> ComplexReport:
    degrees = [
        DegreeReport(
            degree=k,
            dim=rc.dim(k),
            weights=sorted(set(rc.e0_weights[k])),
            basis_weights=list(rc.e0_weights[k]),
            form_weights=rc.basis.weights(k),
            dc_orders=rc.dc_orders(k),
            dc_derivative_orders=rc.dc_derivative_orders(k),
        )
        for k in range(rc.n + 1)
    ]
    operators = None
    if with_operators:
        operators = {f"d_c^{k}": format_operator(block, f"d_c^{k}") for k, block in enumerate(rc.dc)}
    return ComplexReport(
        algebra=rc.algebra.name,
        dim=rc.n,
        step=rc.algebra.step,
        Q=rc.Q,
        delta=rc.delta,
        degrees=degrees,
        projection_iterations=rc.projection.iterations,
        checks=verify_complex(rc).as_flags(),
        operators=operators,
    )


def run(args: argparse.Namespace) -> int:
    rc = build_rumin_complex(resolve_algebra(args))
    report = complex_report(rc, args.dump_operators)

    header = ["degree", "dim", "weights", "basis_weights", "form_weights", "dc_orders", "dc_derivative_orders"]
    rows = [
        [d.degree, d.dim, join(d.weights), join(d.basis_weights), join(d.form_weights),
         join(d.dc_orders), join(d.dc_derivative_orders)]
        for d in report.degrees
    ]

    def pretty() -> str:
        title = (
            f"{report.algebra}: dim {report.dim}, step {report.step}, Q = {report.Q}, "
            f"delta = {report.delta if report.delta is not None else '-'}"
        )
        table = render_table(["k", "dim E0", "weights", "all forms", "d_c orders", "derivative orders"], [
            [d.degree, d.dim, join(d.weights), join(d.form_weights), join(d.dc_orders) or "-",
             join(d.dc_derivative_orders) or "-"]
            for d in report.degrees
        ])
        failing = sorted(name for name, passed in report.checks.items() if passed is False)
        checks = "checks: all passed" if not failing else f"checks failed: {', '.join(failing)}"
        blocks = list(report.operators.values()) if report.operators else []
        return "\n".join([title, table, checks, *blocks])

    emit(report, args.format, header, rows, pretty)
    return EXIT_OK
