"""
Left-invariant forms

Basis of Λ^k g*: wedge monomials θ^I over increasing multi-indices I, ordered
lexicographically; weight w(I) = sum of the layers in I. The monomials are
orthonormal.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from app.core.linalg import pseudo_inverse, to_fraction
from app.lie.algebra import StratifiedLieAlgebra
from app.opalg.enveloping import enveloping_algebra
from app.opalg.operators import OperatorMatrix

MultiIndex = Tuple[int, ...]


def sort_sign(sequence: Sequence[int]) -> Tuple[int, Optional[MultiIndex]]:
    """
    Sign of the permutation sorting `sequence`, and the sorted tuple

    Returns (0, None) when an index repeats (the wedge vanishes).
    """
    items = list(sequence)
    if len(set(items)) != len(items):
        return 0, None
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                sign = -sign
    return sign, tuple(items)


def wedge(left: MultiIndex, right: MultiIndex) -> Tuple[int, Optional[MultiIndex]]:
    """θ^left ∧ θ^right = sign θ^result"""
    return sort_sign(tuple(left) + tuple(right))


@dataclass(frozen=True, eq=False)
class GradedFormBasis:
    algebra: StratifiedLieAlgebra

    @property
    def n(self) -> int:
        return self.algebra.dim

    @cached_property
    def monomials(self) -> Tuple[Tuple[MultiIndex, ...], ...]:
        return tuple(tuple(combinations(range(self.n), k)) for k in range(self.n + 1))

    @cached_property
    def _positions(self) -> Tuple[Dict[MultiIndex, int], ...]:
        return tuple({I: pos for pos, I in enumerate(degree)} for degree in self.monomials)

    def dim(self, k: int) -> int:
        if not 0 <= k <= self.n:
            return 0
        return len(self.monomials[k])

    def index(self, I: MultiIndex) -> int:
        return self._positions[len(I)][tuple(I)]

    def weight(self, I: MultiIndex) -> int:
        return sum(self.algebra.layers[i] for i in I)

    def weights(self, k: int) -> List[int]:
        if not 0 <= k <= self.n:
            return []
        return [self.weight(I) for I in self.monomials[k]]

    def labels(self, k: int) -> List[str]:
        if not 0 <= k <= self.n:
            return []
        return [label(I) for I in self.monomials[k]]

    def weight_table(self) -> List[List[int]]:
        """Distinct weights of all left-invariant k-forms, per degree"""
        return [sorted(set(self.weights(k))) for k in range(self.n + 1)]


def label(I: MultiIndex) -> str:
    if not I:
        return "1"
    return "θ" + "".join(str(i + 1) for i in I)


@lru_cache(maxsize=None)
def form_basis(alg: StratifiedLieAlgebra) -> GradedFormBasis:
    return GradedFormBasis(alg)


def _d0_of_covector(alg: StratifiedLieAlgebra, m: int) -> List[Tuple[Tuple[int, int], object]]:
    """dθ^m = - sum_{i<j} c^m_ij θ^i ∧ θ^j"""
    c = alg.constants
    out = []
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            if c[i][j][m]:
                out.append(((i, j), -c[i][j][m]))
    return out


@lru_cache(maxsize=None)
def ce_differential(alg: StratifiedLieAlgebra, k: int) -> sympy.Matrix:
    """
    Algebraic part d0 : Λ^k -> Λ^(k+1), extended from covectors as an antiderivation

    Args:
        alg: validated algebra
        k: source degree, 0 <= k <= n

    Returns:
        rational matrix of shape (dim Λ^(k+1), dim Λ^k)
    """
    basis = form_basis(alg)
    rows, cols = basis.dim(k + 1), basis.dim(k)
    matrix = sympy.zeros(rows, cols)
    if rows == 0:
        return sympy.ImmutableMatrix(matrix)
    for col, I in enumerate(basis.monomials[k]):
        for position, m in enumerate(I):
            sign = -1 if position % 2 else 1
            for (i, j), coeff in _d0_of_covector(alg, m):
                replaced = I[:position] + (i, j) + I[position + 1:]
                s, J = sort_sign(replaced)
                if s:
                    matrix[basis.index(J), col] += sign * s * sympy.Rational(coeff.numerator, coeff.denominator)
    return sympy.ImmutableMatrix(matrix)


@lru_cache(maxsize=None)
def full_differential(alg: StratifiedLieAlgebra, k: int) -> OperatorMatrix:
    """
    d : Λ^k -> Λ^(k+1) on coefficient functions in the left-invariant frame

    d(f θ^I) = sum_i (X_i f) θ^i ∧ θ^I + f d0 θ^I, so
    d[J, I] = sum_i sign(θ^i ∧ θ^I = ± θ^J) X_i + d0[J, I].
    """
    ring = enveloping_algebra(alg)
    basis = form_basis(alg)
    d0 = ce_differential(alg, k)
    entries: Dict[Tuple[int, int], object] = {}
    for col, I in enumerate(basis.monomials[k]):
        for i in range(alg.dim):
            s, J = sort_sign((i,) + I)
            if not s:
                continue
            key = (basis.index(J), col)
            term = ring.generator(i) * s
            entries[key] = entries[key] + term if key in entries else term
    for row in range(d0.rows):
        for col in range(d0.cols):
            value = d0[row, col]
            if value != 0:
                term = ring.scalar(to_fraction(value))
                key = (row, col)
                entries[key] = entries[key] + term if key in entries else term
    return OperatorMatrix(
        ring,
        tuple(basis.weights(k + 1)),
        tuple(basis.weights(k)),
        entries,
        tuple(basis.labels(k + 1)),
        tuple(basis.labels(k)),
    )


def d0_pseudo_inverse(d0: sympy.Matrix) -> sympy.Matrix:
    """Exact Moore-Penrose pseudo-inverse of a d0 block (orthonormal monomials)"""
    return pseudo_inverse(d0)


def weight_decomposition(operator: OperatorMatrix) -> Dict[int, OperatorMatrix]:
    """Split an operator into its homogeneous parts d = sum_w d_w"""
    parts: Dict[int, Dict[Tuple[int, int], object]] = {}
    for key, value in operator.entries.items():
        for w in value.weights():
            parts.setdefault(w, {})[key] = value.homogeneous_component(w)
    return {
        w: OperatorMatrix(operator.ring, operator.row_weights, operator.col_weights, entries,
                          operator.row_labels, operator.col_labels)
        for w, entries in sorted(parts.items())
    }
