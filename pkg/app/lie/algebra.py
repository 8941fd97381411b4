"""
Stratified Lie algebras

A StratifiedLieAlgebra is a list of layer dimensions plus sparse structure
constants c^k_ij for a basis X_1..X_n ordered layer by layer. Indices are
0-based inside the package and 1-based in every file format.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, List, Mapping, Sequence, Tuple

from app.core.errors import AlgebraInputError
from app.core.linalg import rank, rational_matrix
from app.schemas.report import AxiomFailure, ValidationReport

logger = logging.getLogger(__name__)

Brackets = Mapping[Tuple[int, int], Mapping[int, Fraction]]


@dataclass(frozen=True, eq=False)
class StratifiedLieAlgebra:
    name: str
    layer_dims: Tuple[int, ...]
    brackets: Dict[Tuple[int, int], Dict[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.layer_dims or any(int(d) < 1 for d in self.layer_dims):
            raise AlgebraInputError(f"{self.name}: layer_dims must be positive integers, got {list(self.layer_dims)}")
        n = sum(self.layer_dims)
        cleaned: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for key, coeffs in self.brackets.items():
            i, j = key
            for index in (i, j, *coeffs.keys()):
                if not 0 <= index < n:
                    raise AlgebraInputError(
                        f"{self.name}: basis index {index + 1} outside 1..{n}"
                    )
            nonzero = {k: Fraction(v) for k, v in coeffs.items() if v != 0}
            if nonzero:
                cleaned[(i, j)] = nonzero
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        object.__setattr__(self, "brackets", cleaned)

    def __repr__(self) -> str:
        return f"StratifiedLieAlgebra({self.name!r}, layers={self.layer_dims})"

    @property
    def dim(self) -> int:
        return sum(self.layer_dims)

    @property
    def step(self) -> int:
        return len(self.layer_dims)

    @cached_property
    def layers(self) -> Tuple[int, ...]:
        """Layer (weight) of each basis vector, starting at 1"""
        out: List[int] = []
        for layer, size in enumerate(self.layer_dims, start=1):
            out.extend([layer] * size)
        return tuple(out)

    def layer(self, i: int) -> int:
        return self.layers[i]

    def layer_indices(self, layer: int) -> List[int]:
        return [i for i, w in enumerate(self.layers) if w == layer]

    @cached_property
    def constants(self) -> Tuple[Tuple[Tuple[Fraction, ...], ...], ...]:
        """Dense table constants[i][j][k] = c^k_ij"""
        n = self.dim
        table = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), coeffs in self.brackets.items():
            for k, value in coeffs.items():
                table[i][j][k] = value
        return tuple(tuple(tuple(row) for row in plane) for plane in table)

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        return self.constants[i][j][k]

    def bracket_of_basis(self, i: int, j: int) -> Dict[int, Fraction]:
        return dict(self.brackets.get((i, j), {}))

    def bracket(self, u: Sequence, v: Sequence) -> List:
        """[u, v] for coordinate vectors; works for Fraction or sympy entries"""
        n = self.dim
        out = [0] * n
        for (i, j), coeffs in self.brackets.items():
            if not u[i] or not v[j]:
                continue
            product = u[i] * v[j]
            for k, c in coeffs.items():
                out[k] = out[k] + c * product
        return out

    @property
    def is_abelian(self) -> bool:
        return not self.brackets


# ==================== Validation ====================

def _check_structure(alg: StratifiedLieAlgebra) -> None:
    n = alg.dim
    for (i, j), coeffs in alg.brackets.items():
        if not (0 <= i < n and 0 <= j < n) or any(not 0 <= k < n for k in coeffs):
            raise AlgebraInputError(f"{alg.name}: bracket ({i + 1},{j + 1}) references an index outside 1..{n}")


def validate_algebra(alg: StratifiedLieAlgebra) -> ValidationReport:
    """
    Check antisymmetry, Jacobi, grading and generation

    Args:
        alg: algebra with structurally valid indices

    Returns:
        ValidationReport listing every failed axiom with the offending indices
    """
    _check_structure(alg)
    n = alg.dim
    c = alg.constants
    failures: List[AxiomFailure] = []

    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                if c[i][j][k] != -c[j][i][k]:
                    failures.append(AxiomFailure(
                        axiom="antisymmetry",
                        detail=f"c^{k + 1}_{i + 1}{j + 1} = {c[i][j][k]} but c^{k + 1}_{j + 1}{i + 1} = {c[j][i][k]}",
                    ))

    basis = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    for i, j, l in combinations(range(n), 3):
        x, y, z = basis[i], basis[j], basis[l]
        total = [
            a + b + d
            for a, b, d in zip(
                alg.bracket(alg.bracket(x, y), z),
                alg.bracket(alg.bracket(y, z), x),
                alg.bracket(alg.bracket(z, x), y),
            )
        ]
        if any(total):
            failures.append(AxiomFailure(
                axiom="jacobi",
                detail=f"Jacobi sum for (X{i + 1}, X{j + 1}, X{l + 1}) is {[str(t) for t in total]}",
            ))

    layers = alg.layers
    for (i, j), coeffs in alg.brackets.items():
        for k in coeffs:
            if layers[k] != layers[i] + layers[j]:
                failures.append(AxiomFailure(
                    axiom="grading",
                    detail=f"[X{i + 1}, X{j + 1}] has an X{k + 1} component in layer {layers[k]}, "
                           f"expected layer {layers[i] + layers[j]}",
                ))

    first = alg.layer_indices(1)
    for m in range(1, alg.step):
        target = alg.layer_indices(m + 1)
        rows = []
        for i in first:
            for j in alg.layer_indices(m):
                rows.append([c[i][j][k] for k in target])
        generated = rank(rational_matrix(rows, len(target)))
        if generated != len(target):
            failures.append(AxiomFailure(
                axiom="generation",
                detail=f"[g_1, g_{m}] spans dimension {generated} of layer {m + 1} (dim {len(target)})",
            ))

    report = ValidationReport(algebra=alg.name, passed=not failures, failures=failures)
    if failures:
        logger.warning("algebra %s failed %d axiom check(s)", alg.name, len(failures))
    return report


def homogeneous_dimension(alg: StratifiedLieAlgebra) -> int:
    """Q = sum over layers of layer * dim(layer)"""
    return sum(layer * size for layer, size in enumerate(alg.layer_dims, start=1))
