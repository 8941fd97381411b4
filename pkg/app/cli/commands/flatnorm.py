"""
flatnorm: mass, normal mass and flat norm of a current file
"""
import argparse

from app.cli.deps import common_options, get_complex, get_mode, load_current
from app.cli.output import emit, render_table
from app.core.errors import EXIT_OK
from app.discrete.currents import mass, normal_mass
from app.discrete.flat import flat_norm_dual, flat_norm_primal
from app.schemas.report import FlatNormReport, WitnessSummary

NAME = "flatnorm"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[common_options()],
        help="mass, normal mass and primal/dual flat norm of a current",
    )
    parser.add_argument("current", help="current JSON file")


def run(args: argparse.Namespace) -> int:
    mode = get_mode(args)
    alg, grid, T = load_current(args.current, mode, args.algebra)
    rc = get_complex(alg, args)

    report = FlatNormReport(
        algebra=alg.name,
        dimension=T.dimension,
        mode=mode,
        mass=str(mass(T)),
        normal_mass=str(normal_mass(rc, grid, T, mode)),
    )
    if T.dimension < rc.n:
        primal = flat_norm_primal(rc, grid, T, mode)
        dual = flat_norm_dual(rc, grid, T, mode)
        report.flat_primal = str(primal.value)
        report.flat_dual = str(dual.value)
        report.gap = str(abs(primal.value - dual.value))
        report.witness = WitnessSummary(
            mass_S=str(mass(primal.S)),
            mass_R=str(mass(primal.R)),
            support_S=len(primal.S.support()),
            support_R=len(primal.R.support()),
        )

    header = ["algebra", "dimension", "mode", "mass", "normal_mass", "flat_primal", "flat_dual", "gap"]
    rows = [[report.algebra, report.dimension, report.mode, report.mass, report.normal_mass,
             report.flat_primal, report.flat_dual, report.gap]]

    def pretty() -> str:
        lines = [
            ["mass", report.mass],
            ["normal mass", report.normal_mass],
            ["flat norm (primal)", report.flat_primal],
            ["flat norm (dual)", report.flat_dual],
            ["duality gap", report.gap],
        ]
        if report.witness:
            lines.append(["witness M(S) + M(R)", f"{report.witness.mass_S} + {report.witness.mass_R}"])
        title = f"{report.dimension}-current on {alg.name} ({mode})"
        return f"{title}\n{render_table(['quantity', 'value'], lines)}"

    emit(report, args.format, header, rows, pretty)
    return EXIT_OK
