"""
Rumin complex construction

E0^k = ker d0 ∩ (im d0)^⊥ in Λ^k, Π_E from the d0 pseudo-inverse by a
terminating iteration, and d_c = Π_{E0} d Π_E on E0.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from app.core.errors import AlgebraValidationError, ParameterError, ProjectionIterationError
from app.core.linalg import (
    nullspace_basis,
    orthogonal_coordinates,
    stack,
    to_fraction,
)
from app.lie.algebra import StratifiedLieAlgebra, homogeneous_dimension, validate_algebra
from app.lie.frame import left_invariant_frame
from app.opalg.enveloping import EnvelopingAlgebra, enveloping_algebra
from app.opalg.operators import (
    OperatorMatrix,
    constant_operator,
    derivative_orders,
    identity_operator,
    op_compose,
    operator_weights,
    zero_operator,
)
from app.rumin.forms import (
    GradedFormBasis,
    ce_differential,
    d0_pseudo_inverse,
    form_basis,
    full_differential,
    sort_sign,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RuminProjection:
    """Π_E per degree plus the homotopy A_k : Λ^k -> Λ^(k-1) with 1 - Π = A d + d A"""

    projectors: Tuple[OperatorMatrix, ...]
    homotopy: Tuple[Optional[OperatorMatrix], ...]  # homotopy[0] is None
    iterations: int


@dataclass(frozen=True, eq=False)
class RuminComplex:
    algebra: StratifiedLieAlgebra
    ring: EnvelopingAlgebra
    basis: GradedFormBasis
    d0: Tuple[sympy.Matrix, ...]                 # d0[k] : Λ^k -> Λ^(k+1), k < n
    d0_pinv: Tuple[sympy.Matrix, ...]
    d: Tuple[OperatorMatrix, ...]               # full differential, k < n
    e0_vectors: Tuple[sympy.Matrix, ...]         # columns span E0^k inside Λ^k
    e0_weights: Tuple[Tuple[int, ...], ...]
    e0_coordinates: Tuple[sympy.Matrix, ...]     # (E^T E)^-1 E^T
    projection: RuminProjection
    dc: Tuple[OperatorMatrix, ...]              # d_c^k : E0^k -> E0^(k+1), k < n
    Q: int
    delta: Optional[int]

    @property
    def n(self) -> int:
        return self.algebra.dim

    def dim(self, k: int) -> int:
        return len(self.e0_weights[k]) if 0 <= k <= self.n else 0

    def dims(self) -> List[int]:
        return [self.dim(k) for k in range(self.n + 1)]

    def weight_table(self) -> List[List[int]]:
        return [sorted(set(w)) for w in self.e0_weights]

    def dc_orders(self, k: int) -> List[int]:
        if not 0 <= k < self.n:
            return []
        return operator_weights(self.dc[k])

    def dc_derivative_orders(self, k: int) -> List[int]:
        if not 0 <= k < self.n:
            return []
        return derivative_orders(self.dc[k])

    def e0_labels(self, k: int) -> List[str]:
        """Readable labels of the E0^k basis vectors"""
        monomials = self.basis.monomials[k]
        vectors = self.e0_vectors[k]
        labels = []
        for col in range(vectors.cols):
            terms = []
            for row in range(vectors.rows):
                value = vectors[row, col]
                if value == 0:
                    continue
                name = "θ" + "".join(str(i + 1) for i in monomials[row]) if monomials[row] else "1"
                terms.append(name if value == 1 else f"{value}{name}")
            labels.append("+".join(terms))
        return labels


# ==================== Projection ====================

def _dims(basis: GradedFormBasis, k: int) -> Tuple[int, ...]:
    return tuple(basis.weights(k))


def rumin_projection(alg: StratifiedLieAlgebra) -> RuminProjection:
    """
    Π_E = lim P^j with P = 1 - h d - d h, h the d0 pseudo-inverse

    Iterates A_k += h_k Π_k, Π_k <- Π_k P_k until every h_k Π_k vanishes.
    At that point Π is stable, 1 - Π_k = A_(k+1) d_k + d_(k-1) A_k, and the
    remainder h D is nilpotent since D = d - d0 strictly raises form weight.

    Raises:
        ProjectionIterationError: after n * s multiplications without stabilizing
    """
    ring = enveloping_algebra(alg)
    basis = form_basis(alg)
    n = alg.dim
    d = [full_differential(alg, k) for k in range(n)]
    # h[k] : Λ^k -> Λ^(k-1), k = 1..n
    h: Dict[int, OperatorMatrix] = {}
    for k in range(1, n + 1):
        pinv = d0_pseudo_inverse(ce_differential(alg, k - 1))
        h[k] = constant_operator(ring, pinv, _dims(basis, k - 1), _dims(basis, k),
                                 basis.labels(k - 1), basis.labels(k))

    step_maps: List[OperatorMatrix] = []
    for k in range(n + 1):
        P = identity_operator(ring, _dims(basis, k), basis.labels(k))
        if k < n:
            P = P - op_compose(h[k + 1], d[k])
        if k >= 1:
            P = P - op_compose(d[k - 1], h[k])
        step_maps.append(P)

    projectors = [identity_operator(ring, _dims(basis, k), basis.labels(k)) for k in range(n + 1)]
    homotopy: List[Optional[OperatorMatrix]] = [None] + [
        zero_operator(ring, _dims(basis, k - 1), _dims(basis, k)) for k in range(1, n + 1)
    ]

    cap = n * alg.step
    iterations = 0
    while True:
        increments = {k: op_compose(h[k], projectors[k]) for k in range(1, n + 1)}
        if all(inc.is_zero() for inc in increments.values()):
            break
        if iterations >= cap:
            raise ProjectionIterationError(
                f"Π_E iteration for {alg.name} did not stabilize within {cap} steps"
            )
        for k, inc in increments.items():
            homotopy[k] = homotopy[k] + inc
        projectors = [op_compose(projectors[k], step_maps[k]) for k in range(n + 1)]
        iterations += 1

    logger.info("Π_E for %s stabilized after %d step(s)", alg.name, iterations)
    return RuminProjection(tuple(projectors), tuple(homotopy), iterations)


# ==================== E0 ====================

def _e0_basis(alg: StratifiedLieAlgebra, k: int) -> Tuple[sympy.Matrix, List[int]]:
    """Weight-homogeneous basis of ker d0^k ∩ ker (d0^(k-1))^T, block by block"""
    basis = form_basis(alg)
    n = alg.dim
    size = basis.dim(k)
    blocks = []
    if k < n:
        blocks.append(ce_differential(alg, k))
    if k >= 1:
        blocks.append(ce_differential(alg, k - 1).T)
    stacked = stack(blocks, size)
    weights = basis.weights(k)
    columns: List[sympy.Matrix] = []
    column_weights: List[int] = []
    for w in sorted(set(weights)):
        idx = [i for i, wi in enumerate(weights) if wi == w]
        sub = stacked[:, idx] if stacked.rows else sympy.zeros(0, len(idx))
        for vector in nullspace_basis(sub):
            full = sympy.zeros(size, 1)
            for local, global_index in enumerate(idx):
                full[global_index] = vector[local]
            columns.append(full)
            column_weights.append(w)
    matrix = sympy.Matrix.hstack(*columns) if columns else sympy.zeros(size, 0)
    return matrix, column_weights


@lru_cache(maxsize=None)
def build_rumin_complex(alg: StratifiedLieAlgebra) -> RuminComplex:
    """
    Build (E0, d_c) for a stratified algebra

    Args:
        alg: algebra; validated here

    Returns:
        RuminComplex with weight table, d_c blocks, δ and Q

    Raises:
        AlgebraValidationError: when an axiom fails
    """
    report = validate_algebra(alg)
    if not report.passed:
        raise AlgebraValidationError(
            f"{alg.name} is not a stratified Lie algebra: {', '.join(report.failed_axioms())}", report
        )
    ring = enveloping_algebra(alg)
    basis = form_basis(alg)
    n = alg.dim

    d0 = tuple(ce_differential(alg, k) for k in range(n))
    d0_pinv = tuple(d0_pseudo_inverse(m) for m in d0)
    d = tuple(full_differential(alg, k) for k in range(n))

    e0_vectors, e0_weights, e0_coordinates = [], [], []
    for k in range(n + 1):
        vectors, weights = _e0_basis(alg, k)
        e0_vectors.append(vectors)
        e0_weights.append(tuple(weights))
        e0_coordinates.append(orthogonal_coordinates(vectors))

    projection = rumin_projection(alg)

    dc = []
    for k in range(n):
        source = constant_operator(ring, e0_vectors[k], _dims(basis, k), e0_weights[k])
        target = constant_operator(ring, e0_coordinates[k + 1], e0_weights[k + 1], _dims(basis, k + 1))
        block = op_compose(target, op_compose(d[k], op_compose(projection.projectors[k], source)))
        dc.append(block)

    jumps = [w for block in dc for w in operator_weights(block)]
    delta = max(jumps) if jumps else None

    rc = RuminComplex(
        algebra=alg,
        ring=ring,
        basis=basis,
        d0=d0,
        d0_pinv=d0_pinv,
        d=d,
        e0_vectors=tuple(e0_vectors),
        e0_weights=tuple(e0_weights),
        e0_coordinates=tuple(e0_coordinates),
        projection=projection,
        dc=tuple(dc),
        Q=homogeneous_dimension(alg),
        delta=delta,
    )
    logger.info("built Rumin complex of %s: dims %s, delta %s", alg.name, rc.dims(), delta)
    return rc


# ==================== Pairing ====================

def pairing_matrix(rc: RuminComplex, k: int) -> List[List[Fraction]]:
    """M[a][b] = <e_a, e_b> for E0^k basis e_a and E0^(n-k) basis e_b"""
    n = rc.n
    if not 0 <= k <= n:
        raise ParameterError(f"degree {k} outside 0..{n}")
    left_vectors, right_vectors = rc.e0_vectors[k], rc.e0_vectors[n - k]
    left_monomials, right_monomials = rc.basis.monomials[k], rc.basis.monomials[n - k]
    out = []
    for a in range(left_vectors.cols):
        row = []
        for b in range(right_vectors.cols):
            total = Fraction(0)
            for i, I in enumerate(left_monomials):
                x = left_vectors[i, a]
                if x == 0:
                    continue
                for j, J in enumerate(right_monomials):
                    y = right_vectors[j, b]
                    if y == 0:
                        continue
                    sign, _ = sort_sign(I + J)
                    if sign:
                        total += sign * to_fraction(x) * to_fraction(y)
            row.append(total)
        out.append(row)
    return out


def rumin_pairing(rc: RuminComplex, k: int, alpha: Sequence, beta: Sequence):
    """
    Coefficient of θ^1 ∧ ... ∧ θ^n in α ∧ β

    Args:
        rc: complex
        k: degree of alpha; beta has degree n - k
        alpha, beta: E0 coordinate vectors
    """
    n = rc.n
    if not 0 <= k <= n:
        raise ParameterError(f"degree {k} outside 0..{n}")
    if len(alpha) != rc.dim(k) or len(beta) != rc.dim(n - k):
        raise ParameterError(
            f"pairing needs vectors in E0^{k} (dim {rc.dim(k)}) and E0^{n - k} (dim {rc.dim(n - k)})"
        )
    matrix = pairing_matrix(rc, k)
    total = 0
    for a, x in enumerate(alpha):
        for b, y in enumerate(beta):
            if matrix[a][b]:
                total = total + matrix[a][b] * x * y
    return total


# ==================== Symbolic application ====================

def apply_symbolic_dc(rc: RuminComplex, k: int, coefficients: Sequence[sympy.Expr]) -> List[sympy.Expr]:
    """d_c of the E0^k form with the given coefficient functions (exponential coordinates)"""
    if not 0 <= k < rc.n:
        raise ParameterError(f"d_c is defined for degrees 0..{rc.n - 1}")
    return rc.dc[k].apply_symbolic(left_invariant_frame(rc.algebra), list(coefficients))
