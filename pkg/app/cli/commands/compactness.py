"""
compactness: flat-norm covering numbers across refinement levels
"""
import argparse

from app.cli.deps import common_options, get_complex, get_mode, load_probe_params, resolve_algebra
from app.cli.output import emit, render_table
from app.core.errors import EXIT_OK
from app.discrete.probe import compactness_probe

NAME = "compactness"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME,
        parents=[common_options()],
        help="greedy epsilon-nets of random currents with bounded normal mass",
    )
    parser.add_argument("source", nargs="?", help="catalog name or algebra JSON file")
    parser.add_argument("--params", help="ProbeParams JSON file")
    parser.add_argument("--dimension", type=int)
    parser.add_argument("--spacing", dest="h", help="coarsest spacing, 'p/q'")
    parser.add_argument("--nu", help="normal-mass bound, 'p/q'")
    parser.add_argument("--epsilon", help="net radius, 'p/q'")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--levels", type=int)
    parser.add_argument("--support-size", type=int)
    parser.add_argument("--timings", action="store_true", help="add per-level runtime_ms")


def run(args: argparse.Namespace) -> int:
    overrides = {
        "algebra": args.source or args.algebra,
        "dimension": args.dimension,
        "h": args.h,
        "nu": args.nu,
        "epsilon": args.epsilon,
        "samples": args.samples,
        "levels": args.levels,
        "support_size": args.support_size,
        "seed": args.seed,
    }
    params = load_probe_params(args.params, overrides)
    rc = get_complex(resolve_algebra(args, params.algebra), args)
    report = compactness_probe(rc, params, get_mode(args), args.timings)

    header = ["level", "h", "net_size", "max_pairwise_flat", "runtime_ms"]
    rows = [[lv.level, lv.h, lv.net_size, lv.max_pairwise_flat, lv.runtime_ms] for lv in report.levels]

    def pretty() -> str:
        title = (
            f"{report.algebra}, {report.dimension}-currents, N <= {report.nu}, epsilon = {report.epsilon}, "
            f"{report.samples} samples per level, seed {report.seed} ({report.mode})"
        )
        return f"{title}\n{render_table(header, rows)}"

    emit(report, args.format, header, rows, pretty)
    return EXIT_OK
