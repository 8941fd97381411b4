"""
Algebra catalog and algebra files

Catalog names: abelian(n), heisenberg(k), engel. Anything else handed to
load_algebra is read as a JSON algebra file.
"""
import json
import logging
import re
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Tuple, Union

from pydantic import ValidationError

from app.core.errors import AlgebraInputError, SchemaError, UnknownAlgebraError
from app.core.linalg import parse_rational
from app.lie.algebra import StratifiedLieAlgebra
from app.schemas.algebra import AlgebraFile, BracketEntry

logger = logging.getLogger(__name__)

_NAME_PATTERN = re.compile(r"^\s*([a-z]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def _abelian(n: int) -> StratifiedLieAlgebra:
    if n < 1:
        raise UnknownAlgebraError("abelian(n) needs n >= 1")
    return StratifiedLieAlgebra(name=f"abelian({n})", layer_dims=(n,), brackets={})


def _heisenberg(k: int) -> StratifiedLieAlgebra:
    """[X_i, X_{k+i}] = X_{2k+1}, layers (2k, 1)"""
    if k < 1:
        raise UnknownAlgebraError("heisenberg(k) needs k >= 1")
    center = 2 * k
    brackets = {}
    for i in range(k):
        brackets[(i, k + i)] = {center: Fraction(1)}
        brackets[(k + i, i)] = {center: Fraction(-1)}
    return StratifiedLieAlgebra(name=f"heisenberg({k})", layer_dims=(2 * k, 1), brackets=brackets)


def _engel(_: int = 0) -> StratifiedLieAlgebra:
    """[X1, X2] = X3, [X1, X3] = X4, layers (2, 1, 1)"""
    brackets = {
        (0, 1): {2: Fraction(1)},
        (1, 0): {2: Fraction(-1)},
        (0, 2): {3: Fraction(1)},
        (2, 0): {3: Fraction(-1)},
    }
    return StratifiedLieAlgebra(name="engel", layer_dims=(2, 1, 1), brackets=brackets)


CATALOG: Dict[str, Tuple[Callable[[int], StratifiedLieAlgebra], bool]] = {
    "abelian": (_abelian, True),
    "heisenberg": (_heisenberg, True),
    "engel": (_engel, False),
}


def catalog_names() -> Tuple[str, ...]:
    return ("abelian(n)", "heisenberg(k)", "engel")


@lru_cache(maxsize=None)
def catalog(name: str) -> StratifiedLieAlgebra:
    """
    Look up a catalog algebra by name

    The same name always returns the same instance, so downstream caches keyed
    on the algebra are shared.
    """
    match = _NAME_PATTERN.match(name)
    if not match or match.group(1) not in CATALOG:
        raise UnknownAlgebraError(f"unknown algebra {name!r}; catalog: {', '.join(catalog_names())}")
    builder, parametrized = CATALOG[match.group(1)]
    argument = match.group(2)
    if parametrized and argument is None:
        raise UnknownAlgebraError(f"{match.group(1)} needs a size, e.g. {match.group(1)}(1)")
    if not parametrized and argument is not None:
        raise UnknownAlgebraError(f"{match.group(1)} takes no size")
    return builder(int(argument) if argument is not None else 0)


def is_catalog_name(source: str) -> bool:
    match = _NAME_PATTERN.match(source)
    return bool(match) and match.group(1) in CATALOG


def algebra_from_file(document: AlgebraFile) -> StratifiedLieAlgebra:
    """
    Build an algebra from a parsed algebra file

    Missing (j, i) entries are completed by antisymmetry; pairs given both ways
    are kept as written so validate_algebra can report them.
    """
    n = sum(document.layer_dims)
    given: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for entry in document.brackets:
        key = (entry.i - 1, entry.j - 1)
        if key in given:
            raise AlgebraInputError(f"bracket ({entry.i},{entry.j}) listed twice")
        coeffs = {int(k) - 1: parse_rational(v) for k, v in entry.coeffs.items()}
        for index in (entry.i, entry.j, *(k + 1 for k in coeffs)):
            if index > n:
                raise AlgebraInputError(f"{document.name}: basis index {index} outside 1..{n}")
        given[key] = coeffs
    brackets = dict(given)
    for (i, j), coeffs in given.items():
        if (j, i) not in given:
            brackets[(j, i)] = {k: -v for k, v in coeffs.items()}
    return StratifiedLieAlgebra(name=document.name, layer_dims=tuple(document.layer_dims), brackets=brackets)


def algebra_to_file(alg: StratifiedLieAlgebra) -> AlgebraFile:
    entries = [
        BracketEntry(i=i + 1, j=j + 1, coeffs={str(k + 1): str(v) for k, v in sorted(coeffs.items())})
        for (i, j), coeffs in sorted(alg.brackets.items())
        if i < j
    ]
    return AlgebraFile(name=alg.name, layer_dims=list(alg.layer_dims), brackets=entries)


def parse_algebra_json(text: str) -> StratifiedLieAlgebra:
    try:
        document = AlgebraFile.model_validate_json(text)
    except ValidationError as exc:
        raise SchemaError(f"algebra file does not match the schema: {exc.errors()[0]['msg']}")
    return algebra_from_file(document)


def load_algebra(source: Union[str, Path]) -> StratifiedLieAlgebra:
    """
    Resolve a catalog name or a path to an algebra JSON file

    Args:
        source: catalog name such as "heisenberg(1)" or a file path

    Returns:
        The (not yet validated) algebra
    """
    if isinstance(source, str) and is_catalog_name(source):
        alg = catalog(source)
        logger.info("loaded catalog algebra %s", alg.name)
        return alg
    path = Path(source)
    if not path.is_file():
        raise UnknownAlgebraError(f"{source!r} is neither a catalog name nor an existing file")
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}")
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}")
    alg = parse_algebra_json(text)
    logger.info("loaded algebra %s from %s", alg.name, path)
    return alg
