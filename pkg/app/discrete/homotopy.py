"""
Discrete homotopy inverse of D_c

Finite differences do not compose to zero, so the discrete differentials are
first corrected against the image of the previous one:

    D~^0 = D^0,    D~^j = D^j (I - D~^(j-1) pinv(D~^(j-1)))

which makes D~^k D~^(k-1) = 0 exactly in the float sense. With
K_k = pinv(D~^(k-1)) and K_(k+1) = pinv(D~^k),

    D~ K_k + K_(k+1) D~ = Id - H

where H is the orthogonal projector onto the kernel of the normal-equations
operator D~ D~^T + D~^T D~ (the discrete harmonic space). Everything here is
dense float64.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from scipy import linalg

from app.core.config import settings
from app.core.errors import HomotopyError, OperatorShapeError, ParameterError
from app.discrete.forms import DiscreteForm
from app.discrete.grid import Grid
from app.discrete.operators import DiscreteOperator, discretize_dc
from app.rumin.complex import RuminComplex

logger = logging.getLogger(__name__)


def _dense_operator(grid: Grid, matrix: np.ndarray, source: int, target: int, provenance: str) -> DiscreteOperator:
    source_e = matrix.shape[1] // grid.size
    target_e = matrix.shape[0] // grid.size
    rows: Dict[int, Dict[int, float]] = {}
    for r, c in zip(*np.nonzero(matrix)):
        rows.setdefault(int(r), {})[int(c)] = float(matrix[r, c])
    return DiscreteOperator(
        grid=grid,
        source=source,
        target=target,
        source_components=source_e,
        target_components=target_e,
        mode="float",
        rows=rows,
        margin=0,
        provenance=provenance,
    )


def corrected_differentials(rc: RuminComplex, grid: Grid, upto: int) -> List[np.ndarray]:
    """D~^0 .. D~^upto as dense matrices"""
    out: List[np.ndarray] = []
    for j in range(upto + 1):
        D = discretize_dc(rc, grid, j, "float").to_dense()
        if out:
            previous = out[-1]
            image = previous @ linalg.pinv(previous, rtol=settings.HARMONIC_RCOND)
            D = D - D @ image
        out.append(D)
    return out


@dataclass(frozen=True, eq=False)
class DiscreteHomotopy:
    rc: RuminComplex
    grid: Grid
    degree: int
    incoming: Optional[np.ndarray]  # D~^(k-1), None in degree 0
    outgoing: Optional[np.ndarray]  # D~^k, None in top degree
    K: Optional[DiscreteOperator]  # degree k -> k-1
    K_next: Optional[DiscreteOperator]  # degree k+1 -> k
    harmonic: np.ndarray  # orthonormal columns spanning the harmonic space
    identity_residual: float

    @property
    def harmonic_dimension(self) -> int:
        return self.harmonic.shape[1]

    @property
    def harmonic_projector(self) -> np.ndarray:
        return self.harmonic @ self.harmonic.T

    def _check(self, omega: DiscreteForm) -> np.ndarray:
        if omega.grid is not self.grid or omega.degree != self.degree:
            raise OperatorShapeError(f"homotopy of degree {self.degree} applied to a degree-{omega.degree} form")
        return omega.as_float().vector()

    def project_off_harmonics(self, omega: DiscreteForm) -> DiscreteForm:
        v = self._check(omega)
        v = v - self.harmonic @ (self.harmonic.T @ v)
        return DiscreteForm(self.grid, self.degree, v.reshape(self.grid.size, -1))

    def residual(self, omega: DiscreteForm) -> float:
        """|w - D~ K w - K D~ w| in the sup norm"""
        v = self._check(omega)
        rest = v.copy()
        if self.incoming is not None:
            rest -= self.incoming @ self.K.apply_vector(v)
        if self.outgoing is not None:
            rest -= self.K_next.apply_vector(self.outgoing @ v)
        return float(np.abs(rest).max()) if rest.size else 0.0


def discrete_homotopy(rc: RuminComplex, grid: Grid, k: int) -> DiscreteHomotopy:
    """
    Pseudo-inverse homotopy for the discretized complex around degree k

    Args:
        rc: complex whose d_c is discretized
        grid: grid carrying the forms
        k: degree of the forms the identity is stated for, 0 <= k <= n

    Returns:
        DiscreteHomotopy with K, K_next, the harmonic basis and a residual evaluator

    Raises:
        ParameterError: k outside 0..n
        HomotopyError: Id - D~K - KD~ - H exceeds HOMOTOPY_TOLERANCE
    """
    n = rc.n
    if not 0 <= k <= n:
        raise ParameterError(f"degree {k} outside 0..{n}")
    size = grid.size * rc.dim(k)
    differentials = corrected_differentials(rc, grid, min(k, n - 1))
    incoming = differentials[k - 1] if k > 0 else None
    outgoing = differentials[k] if k < n else None

    laplacian = np.zeros((size, size))
    K = K_next = None
    projection = np.zeros((size, size))
    if incoming is not None:
        pinv = linalg.pinv(incoming, rtol=settings.HARMONIC_RCOND)
        K = _dense_operator(grid, pinv, k, k - 1, f"K_{k} of {rc.algebra.name} on {grid.shape}")
        laplacian += incoming @ incoming.T
        projection += incoming @ pinv
    if outgoing is not None:
        pinv = linalg.pinv(outgoing, rtol=settings.HARMONIC_RCOND)
        K_next = _dense_operator(grid, pinv, k + 1, k, f"K_{k + 1} of {rc.algebra.name} on {grid.shape}")
        laplacian += outgoing.T @ outgoing
        projection += pinv @ outgoing

    harmonic = linalg.null_space(laplacian, rcond=settings.HARMONIC_RCOND)
    defect = np.eye(size) - projection - harmonic @ harmonic.T
    residual = float(np.abs(defect).max()) if size else 0.0
    logger.info(
        "discrete homotopy in degree %d on %s: harmonic dimension %d, identity residual %.3g",
        k, grid, harmonic.shape[1], residual,
    )
    if residual > settings.HOMOTOPY_TOLERANCE:
        raise HomotopyError(f"homotopy identity fails in degree {k}: residual {residual:.3g}", residual)
    return DiscreteHomotopy(rc, grid, k, incoming, outgoing, K, K_next, harmonic, residual)
