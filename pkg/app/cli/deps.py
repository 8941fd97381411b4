"""
Shared input resolution for the commands
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple, Union

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import CurrentError, SchemaError, UnknownAlgebraError
from app.core.linalg import parse_rational
from app.discrete.currents import DiscreteCurrent, current_from_entries
from app.discrete.grid import Grid
from app.lie.algebra import StratifiedLieAlgebra
from app.lie.catalog import is_catalog_name, load_algebra
from app.opalg.operators import format_operator
from app.rumin.complex import RuminComplex, build_rumin_complex
from app.schemas.current import CurrentFile, ProbeParams

logger = logging.getLogger(__name__)


def common_options() -> argparse.ArgumentParser:
    """Options every command accepts"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--algebra", help="catalog name such as heisenberg(1), or an algebra JSON file")
    parser.add_argument("--format", choices=("pretty", "json", "csv"), default="pretty")
    parser.add_argument("--mode", choices=("exact", "float"), default=None,
                        help=f"arithmetic of numerical commands (default {settings.DEFAULT_MODE})")
    parser.add_argument("--seed", type=int, default=None, help="seed of randomized experiments")
    parser.add_argument("--dump-operators", action="store_true",
                        help="print the d_c blocks as PBW operator tables on stderr")
    return parser


def get_mode(args: argparse.Namespace) -> str:
    return args.mode or settings.DEFAULT_MODE


def resolve_algebra(args: argparse.Namespace, fallback: Optional[str] = None) -> StratifiedLieAlgebra:
    """
    Positional algebra source, else --algebra, else the fallback

    Raises:
        UnknownAlgebraError: no source given, or positional and --algebra disagree
    """
    positional = getattr(args, "source", None)
    if positional and args.algebra and positional != args.algebra:
        raise UnknownAlgebraError(f"algebra given twice: {positional!r} and --algebra {args.algebra!r}")
    source = positional or args.algebra or fallback
    if not source:
        raise UnknownAlgebraError("no algebra given; pass a catalog name or an algebra file")
    return load_algebra(source)


def get_complex(alg: StratifiedLieAlgebra, args: argparse.Namespace) -> RuminComplex:
    rc = build_rumin_complex(alg)
    if args.dump_operators:
        dump_operators(rc)
    return rc


def dump_operators(rc: RuminComplex) -> None:
    for k, block in enumerate(rc.dc):
        print(format_operator(block, f"d_c^{k}"), file=sys.stderr)


def _read_json(path: Union[str, Path], what: str) -> str:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {what} {path}: {exc}")
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{what} {path} is not valid JSON: {exc}")
    return text


def _schema_message(exc: ValidationError) -> str:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def _parse_value(value, mode: str):
    """Exact mode reads floats through their decimal representation"""
    if mode == "exact":
        if isinstance(value, float):
            return Fraction(repr(value))
        return parse_rational(value)
    return float(parse_rational(value)) if isinstance(value, str) else float(value)


def load_current(
    path: Union[str, Path],
    mode: str,
    algebra: Optional[str] = None,
) -> Tuple[StratifiedLieAlgebra, Grid, DiscreteCurrent]:
    """
    Read a current file

    Args:
        path: current JSON file
        mode: "exact" or "float" coefficient arithmetic
        algebra: overrides the file's algebra source when given

    Returns:
        (algebra, grid, current)
    """
    text = _read_json(path, "current file")
    try:
        document = CurrentFile.model_validate_json(text)
    except ValidationError as exc:
        raise SchemaError(f"current file does not match the schema: {_schema_message(exc)}")

    source = algebra or document.algebra
    if not is_catalog_name(source) and not Path(source).is_absolute():
        relative = Path(path).parent / source
        if relative.is_file():
            source = str(relative)
    alg = load_algebra(source)
    grid = Grid.from_spec(alg, document.grid)
    if document.dimension > alg.dim:
        raise CurrentError(f"{document.dimension}-currents do not exist in dimension {alg.dim}")
    entries = [(tuple(e.point), e.basis, _parse_value(e.value, mode)) for e in document.coefficients]
    current = current_from_entries(grid, document.dimension, entries)
    logger.info("loaded %d-current with %d coefficients on %s", current.dimension, len(current.coefficients), grid)
    return alg, grid, current


def load_probe_params(path: Optional[str], overrides: dict) -> ProbeParams:
    """ProbeParams from an optional JSON file, then command-line overrides"""
    data = json.loads(_read_json(path, "probe parameters")) if path else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    data.setdefault("seed", settings.DEFAULT_SEED)
    try:
        return ProbeParams.model_validate(data)
    except ValidationError as exc:
        raise SchemaError(f"probe parameters do not match the schema: {_schema_message(exc)}")
