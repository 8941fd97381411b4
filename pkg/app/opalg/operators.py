"""
Matrices of left-invariant differential operators

Rows and columns are indexed by graded form-basis elements and carry their
weights. Entries are EnvelopingElements; the matrix acts on column vectors of
coefficient functions.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from app.core.errors import OperatorShapeError
from app.core.linalg import to_fraction
from app.opalg.enveloping import EnvelopingAlgebra, EnvelopingElement

Index = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    ring: EnvelopingAlgebra
    row_weights: Tuple[int, ...]
    col_weights: Tuple[int, ...]
    entries: Dict[Index, EnvelopingElement] = field(default_factory=dict)
    row_labels: Optional[Tuple[str, ...]] = None
    col_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        rows, cols = self.shape
        cleaned = {}
        for (r, c), value in self.entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise OperatorShapeError(f"entry ({r}, {c}) outside shape {self.shape}")
            if not value.is_zero:
                cleaned[(r, c)] = value
        object.__setattr__(self, "entries", cleaned)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_weights), len(self.col_weights)

    def entry(self, r: int, c: int) -> EnvelopingElement:
        return self.entries.get((r, c), self.ring.zero())

    def is_zero(self) -> bool:
        return not self.entries

    def _relabel(self, entries, row_weights=None, col_weights=None, row_labels=None, col_labels=None):
        return OperatorMatrix(
            ring=self.ring,
            row_weights=self.row_weights if row_weights is None else row_weights,
            col_weights=self.col_weights if col_weights is None else col_weights,
            entries=entries,
            row_labels=self.row_labels if row_labels is None else row_labels,
            col_labels=self.col_labels if col_labels is None else col_labels,
        )

    def _check_same_shape(self, other: "OperatorMatrix") -> None:
        if self.shape != other.shape:
            raise OperatorShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_same_shape(other)
        entries = dict(self.entries)
        for key, value in other.entries.items():
            entries[key] = entries[key] + value if key in entries else value
        return self._relabel(entries)

    def __neg__(self) -> "OperatorMatrix":
        return self._relabel({key: -value for key, value in self.entries.items()})

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + (-other)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return op_compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    __hash__ = object.__hash__

    def apply_symbolic(self, frame, functions: Sequence[sympy.Expr]) -> List[sympy.Expr]:
        """Apply to a column of coefficient functions through a FrameExpression"""
        rows, cols = self.shape
        if len(functions) != cols:
            raise OperatorShapeError(f"operator takes {cols} coefficients, got {len(functions)}")
        out = [sympy.Integer(0)] * rows
        for (r, c), value in self.entries.items():
            out[r] = out[r] + frame.apply(value, functions[c])
        return [sympy.expand(v) for v in out]


# ==================== Constructors ====================

def zero_operator(ring: EnvelopingAlgebra, row_weights: Sequence[int], col_weights: Sequence[int]) -> OperatorMatrix:
    return OperatorMatrix(ring, tuple(row_weights), tuple(col_weights), {})


def identity_operator(ring: EnvelopingAlgebra, weights: Sequence[int], labels: Optional[Sequence[str]] = None) -> OperatorMatrix:
    one = ring.scalar(1)
    labels = tuple(labels) if labels is not None else None
    return OperatorMatrix(ring, tuple(weights), tuple(weights), {(i, i): one for i in range(len(weights))}, labels, labels)


def constant_operator(
    ring: EnvelopingAlgebra,
    matrix: sympy.Matrix,
    row_weights: Sequence[int],
    col_weights: Sequence[int],
    row_labels: Optional[Sequence[str]] = None,
    col_labels: Optional[Sequence[str]] = None,
) -> OperatorMatrix:
    """Lift a rational matrix to an operator of order zero"""
    if (matrix.rows, matrix.cols) != (len(row_weights), len(col_weights)):
        raise OperatorShapeError(f"matrix {matrix.shape} does not match weights ({len(row_weights)}, {len(col_weights)})")
    entries = {}
    for r in range(matrix.rows):
        for c in range(matrix.cols):
            value = matrix[r, c]
            if value != 0:
                entries[(r, c)] = ring.scalar(to_fraction(value))
    return OperatorMatrix(
        ring, tuple(row_weights), tuple(col_weights), entries,
        tuple(row_labels) if row_labels is not None else None,
        tuple(col_labels) if col_labels is not None else None,
    )


# ==================== Operations ====================

def op_compose(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    """
    (A o B)[r, c] = sum_m A[r, m] * B[m, c], products taken in U(g)

    Raises:
        OperatorShapeError: when A's column count differs from B's row count
    """
    if A.shape[1] != B.shape[0]:
        raise OperatorShapeError(f"cannot compose {A.shape} with {B.shape}")
    by_row: Dict[int, List[Tuple[int, EnvelopingElement]]] = {}
    for (m, c), value in B.entries.items():
        by_row.setdefault(m, []).append((c, value))
    entries: Dict[Index, EnvelopingElement] = {}
    for (r, m), left in A.entries.items():
        for c, right in by_row.get(m, ()):
            product = left * right
            key = (r, c)
            entries[key] = entries[key] + product if key in entries else product
    return OperatorMatrix(A.ring, A.row_weights, B.col_weights, entries, A.row_labels, B.col_labels)


def operator_order(A: OperatorMatrix) -> Dict[Index, Tuple[int, int]]:
    """Per nonzero entry, the (min, max) layer-weighted degree of its monomials"""
    return {key: value.weight_range() for key, value in sorted(A.entries.items())}


def operator_weights(A: OperatorMatrix) -> List[int]:
    """Distinct weights over all entries"""
    weights = set()
    for value in A.entries.values():
        weights.update(value.weights())
    return sorted(weights)


def derivative_orders(A: OperatorMatrix) -> List[int]:
    orders = set()
    for value in A.entries.values():
        orders.update(value.derivative_orders())
    return sorted(orders)


def max_derivative_order(A: OperatorMatrix) -> int:
    return max(derivative_orders(A), default=0)


def check_weight_bookkeeping(A: OperatorMatrix) -> List[Index]:
    """Entries with a monomial whose weight is not row weight - column weight"""
    bad = []
    layers = A.ring.layers
    for (r, c), value in sorted(A.entries.items()):
        jump = A.row_weights[r] - A.col_weights[c]
        if any(m.weight(layers) != jump for m in value.terms):
            bad.append((r, c))
    return bad


def format_operator(A: OperatorMatrix, name: str = "") -> str:
    """
    Textual dump, one nonzero entry per line:
        name[row_label, col_label] = p/q · X1^e1 ... + ...
    """
    lines = []
    header = f"{name} " if name else ""
    lines.append(f"{header}shape={A.shape[0]}x{A.shape[1]}")
    for (r, c), value in sorted(A.entries.items()):
        row = A.row_labels[r] if A.row_labels else str(r)
        col = A.col_labels[c] if A.col_labels else str(c)
        lines.append(f"  [{row}, {col}] = {value.format()}")
    return "\n".join(lines)


def fraction_entry(value: EnvelopingElement) -> Fraction:
    """Constant term of an order-zero entry"""
    if any(m.order for m in value.terms):
        raise OperatorShapeError("entry is not of order zero")
    return next(iter(value.terms.values()), Fraction(0))
