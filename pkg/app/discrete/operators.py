"""
Finite-difference d_c

Each frame field X_i = sum_j a_ij(x) d/dx_j becomes sum_j diag(a_ij) D_j with
D_j the centered difference along coordinate j (rows on the faces of the
box are zero). A PBW monomial X_1^e1 ... X_n^en becomes the product of those
matrices, so a composition of M factors reaches M cells from its row point;
rows of points closer than M cells to a face are zeroed.

Form vectors are indexed point * dim E0^k + basis.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy import sparse
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from app.core.config import settings
from app.core.errors import GridTooSmallError, OperatorShapeError, ParameterError
from app.discrete.forms import DiscreteForm, check_mode
from app.discrete.grid import Grid
from app.lie.algebra import StratifiedLieAlgebra
from app.lie.frame import FrameExpression, left_invariant_frame
from app.opalg.enveloping import PBWMonomial
from app.opalg.operators import max_derivative_order
from app.rumin.complex import RuminComplex
from app.schemas.current import GridSpec

logger = logging.getLogger(__name__)

SparseRows = Dict[int, Dict[int, object]]


def _qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def _fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


# ==================== Scalar stencils ====================

class _Stencils:
    """Scalar stencil matrices on one grid: scipy.sparse (float) or DomainMatrix over QQ (exact)"""

    def __init__(self, grid: Grid, frame: FrameExpression, mode: str):
        self.grid = grid
        self.frame = frame
        self.mode = mode
        self.size = grid.size
        self._fields: Dict[int, object] = {}
        self._monomials: Dict[PBWMonomial, object] = {}

    def _from_triplets(self, rows: List[int], cols: List[int], values: List) -> object:
        if self.mode == "float":
            return sparse.csr_matrix(
                (np.asarray(values, dtype=float), (rows, cols)), shape=(self.size, self.size)
            )
        entries: SparseRows = {}
        for r, c, v in zip(rows, cols, values):
            if v:
                row = entries.setdefault(r, {})
                row[c] = row.get(c, QQ(0)) + _qq(v)
        return DomainMatrix(entries, (self.size, self.size), QQ)

    def identity(self) -> object:
        indices = list(range(self.size))
        one = 1.0 if self.mode == "float" else Fraction(1)
        return self._from_triplets(indices, indices, [one] * self.size)

    def difference(self, axis: int) -> object:
        shape = self.grid.shape
        stride = int(np.prod(shape[axis + 1:], dtype=np.int64))
        position = (np.arange(self.size) // stride) % shape[axis]
        inner = np.flatnonzero((position >= 1) & (position <= shape[axis] - 2))
        spacing = self.grid.spacing[axis]
        half = 1 / (2 * float(spacing)) if self.mode == "float" else 1 / (2 * spacing)
        rows = list(inner) + list(inner)
        cols = list(inner + stride) + list(inner - stride)
        values = [half] * len(inner) + [-half] * len(inner)
        return self._from_triplets([int(r) for r in rows], [int(c) for c in cols], values)

    def _diagonal(self, values: List) -> object:
        indices = list(range(self.size))
        return self._from_triplets(indices, indices, values)

    def frame_field(self, i: int) -> object:
        """X_i as a difference operator"""
        if i in self._fields:
            return self._fields[i]
        total = None
        for j, poly in enumerate(self.frame.polynomials[i]):
            if poly.is_zero:
                continue
            if self.mode == "float":
                coefficient = self._diagonal(list(poly.evaluate(self.grid.coordinates)))
            else:
                coefficient = self._diagonal([poly.evaluate_exact(x) for x in self.grid.exact_points])
            term = self._matmul(coefficient, self.difference(j))
            total = term if total is None else total + term
        self._fields[i] = total
        return total

    def _matmul(self, left, right):
        return left @ right if self.mode == "float" else left.matmul(right)

    def monomial(self, monomial: PBWMonomial) -> object:
        """X_1^e1 ... X_n^en, the rightmost factor acting first"""
        if monomial in self._monomials:
            return self._monomials[monomial]
        result = None
        for i, e in enumerate(monomial.exponents):
            for _ in range(e):
                field = self.frame_field(i)
                result = field if result is None else self._matmul(result, field)
        if result is None:
            result = self.identity()
        self._monomials[monomial] = result
        return result

    def triplets(self, matrix) -> Iterator[Tuple[int, int, object]]:
        if self.mode == "float":
            coo = matrix.tocoo()
            for r, c, v in zip(coo.row, coo.col, coo.data):
                if v != 0:
                    yield int(r), int(c), float(v)
            return
        for r, row in matrix.to_sparse().rep.items():
            for c, v in row.items():
                if v:
                    yield r, c, _fraction(v)


# ==================== Operator ====================

@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """
    Sparse operator from degree-`source` forms to degree-`target` forms

    `rows` maps a row index to {column index: value}; Fractions in exact mode.
    """

    grid: Grid
    source: int
    target: int
    source_components: int
    target_components: int
    mode: str
    rows: SparseRows
    margin: int
    provenance: str

    @property
    def shape(self) -> Tuple[int, int]:
        return self.grid.size * self.target_components, self.grid.size * self.source_components

    @cached_property
    def valid_points(self) -> np.ndarray:
        return self.grid.interior(self.margin)

    @cached_property
    def columns(self) -> SparseRows:
        out: SparseRows = {}
        for r, row in self.rows.items():
            for c, v in row.items():
                out.setdefault(c, {})[r] = v
        return out

    @cached_property
    def matrix(self):
        """scipy.sparse.csr_matrix (float) or DomainMatrix over QQ (exact)"""
        if self.mode == "float":
            rows, cols, data = [], [], []
            for r, row in self.rows.items():
                for c, v in row.items():
                    rows.append(r)
                    cols.append(c)
                    data.append(float(v))
            return sparse.csr_matrix((data, (rows, cols)), shape=self.shape)
        entries = {r: {c: _qq(v) for c, v in row.items()} for r, row in self.rows.items()}
        return DomainMatrix(entries, self.shape, QQ)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape)
        for r, row in self.rows.items():
            for c, v in row.items():
                dense[r, c] = float(v)
        return dense

    def row_point(self, row: int) -> int:
        return row // self.target_components

    def apply_vector(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector)
        if vector.shape != (self.shape[1],):
            raise OperatorShapeError(f"operator takes vectors of length {self.shape[1]}, got {vector.shape}")
        if self.mode == "float":
            return self.matrix @ vector.astype(float)
        return self._apply_exact(vector)

    def _apply_exact(self, vector: np.ndarray) -> np.ndarray:
        column = DomainMatrix([[_qq(Fraction(v))] for v in vector], (len(vector), 1), QQ)
        product = self.matrix.matmul(column.to_sparse()).to_sparse().rep
        out = np.full(self.shape[0], Fraction(0), dtype=object)
        for r, row in product.items():
            out[r] = _fraction(row.get(0, QQ(0)))
        return out

    def __call__(self, form: DiscreteForm) -> DiscreteForm:
        if form.grid is not self.grid or form.degree != self.source:
            raise OperatorShapeError(
                f"{self.provenance} acts on degree-{self.source} forms of its own grid"
            )
        if form.components != self.source_components:
            raise OperatorShapeError(
                f"form has {form.components} components, E0^{self.source} has {self.source_components}"
            )
        values = self.apply_vector(form.vector()).reshape(self.grid.size, self.target_components)
        return DiscreteForm(self.grid, self.target, values, form.margin + self.margin)

    def transpose_apply(self, coefficients: Dict[int, object]) -> Dict[int, object]:
        """D^T on a sparse vector {row index: value}"""
        out: Dict[int, object] = {}
        for r, t in coefficients.items():
            if not t:
                continue
            for c, v in self.rows.get(r, {}).items():
                out[c] = out.get(c, 0) + t * v
        return {c: v for c, v in out.items() if v}


@lru_cache(maxsize=32)
def _assemble_rows(rc: RuminComplex, algebra: StratifiedLieAlgebra, grid_key: str, k: int, mode: str) -> SparseRows:
    """Stencil rows of D_c^k, cached on the grid's serialized spec"""
    grid = Grid.from_spec(algebra, GridSpec.model_validate_json(grid_key))
    block = rc.dc[k]
    margin = max_derivative_order(block)
    stencils = _Stencils(grid, left_invariant_frame(rc.algebra), mode)
    target_e = rc.dim(k + 1)
    source_e = rc.dim(k)
    valid = np.zeros(grid.size, dtype=bool)
    valid[grid.interior(margin)] = True

    rows: SparseRows = {}
    zero = 0.0 if mode == "float" else Fraction(0)
    for (r, c), element in sorted(block.entries.items()):
        for monomial, coeff in element.terms.items():
            factor = float(coeff) if mode == "float" else coeff
            for p, q, v in stencils.triplets(stencils.monomial(monomial)):
                if not valid[p]:
                    continue
                row = rows.setdefault(p * target_e + r, {})
                col = q * source_e + c
                row[col] = row.get(col, zero) + factor * v
    rows = {r: {c: v for c, v in row.items() if v} for r, row in rows.items()}
    return {r: row for r, row in rows.items() if row}


def discretize_dc(rc: RuminComplex, grid: Grid, k: int, mode: Optional[str] = None) -> DiscreteOperator:
    """
    Finite-difference version of d_c^k

    Args:
        rc: complex whose d_c^k is discretized
        grid: grid of rc's algebra
        k: source degree, 0 <= k < n
        mode: "exact" (rational entries) or "float"; settings.DEFAULT_MODE when omitted

    Returns:
        DiscreteOperator with margin = highest derivative order of d_c^k.
        Equal grids share the assembled rows.

    Raises:
        GridTooSmallError: no grid point is that many cells inside the box
    """
    mode = check_mode(mode or settings.DEFAULT_MODE)
    if grid.algebra is not rc.algebra and grid.algebra.layers != rc.algebra.layers:
        raise OperatorShapeError(f"grid of {grid.algebra.name} used with complex of {rc.algebra.name}")
    if not 0 <= k < rc.n:
        raise ParameterError(f"d_c^{k} does not exist for dimension {rc.n}")
    margin = max_derivative_order(rc.dc[k])
    if not len(grid.interior(margin)):
        raise GridTooSmallError(
            f"grid {grid.shape} has no point {margin} cells inside the box, needed by d_c^{k}"
        )

    rows = _assemble_rows(rc, grid.algebra, grid.to_spec().model_dump_json(), k, mode)
    operator = DiscreteOperator(
        grid=grid,
        source=k,
        target=k + 1,
        source_components=rc.dim(k),
        target_components=rc.dim(k + 1),
        mode=mode,
        rows=rows,
        margin=margin,
        provenance=f"D_c^{k} of {rc.algebra.name} on {grid.shape}, centered differences",
    )
    logger.info("assembled %s (%d nonzeros)", operator.provenance, sum(len(r) for r in rows.values()))
    return operator
