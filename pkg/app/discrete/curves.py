"""
Boundary correction for integration currents on the Heisenberg group

A Rumin 1-form w = f1 theta1 + f2 theta2 extends to the de Rham form
w - g theta3 with g = X2 f1 - X1 f2, the unique choice whose differential
has no theta1 ^ theta2 part. Integrated over the boundary curve of a surface,
the extension is what the integration current sees; on horizontal curves
theta3 vanishes on the tangent and the correction is zero.

Curves are closed polylines of one-parameter pieces v * exp(t w), t in [0, 1].
Along such a piece the left-invariant coordinates of the tangent are w itself,
so theta_i(gamma') = w_i and only the coefficients need quadrature.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
import sympy

from app.core.config import settings
from app.core.errors import CurveError, ParameterError
from app.core.linalg import parse_rational
from app.lie.algebra import StratifiedLieAlgebra
from app.lie.frame import Polynomial, left_invariant_frame
from app.lie.group import GroupPoint, bch_multiply, coordinate_symbols, vectorized_group_law
from app.rumin.complex import RuminComplex

logger = logging.getLogger(__name__)


def _is_heisenberg(alg: StratifiedLieAlgebra) -> bool:
    return alg.layer_dims == (2, 1) and alg.structure_constant(0, 1, 2) == 1


@dataclass(frozen=True)
class Polyline:
    start: GroupPoint
    increments: Tuple[Tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, start: Sequence, increments: Sequence[Sequence]) -> "Polyline":
        return cls(
            GroupPoint.of(start),
            tuple(tuple(parse_rational(c) for c in w) for w in increments),
        )

    def vertices(self, alg: StratifiedLieAlgebra) -> List[GroupPoint]:
        """start, start * exp(w1), start * exp(w1) * exp(w2), ..."""
        points = [self.start]
        for w in self.increments:
            if len(w) != alg.dim:
                raise CurveError(f"increment {w} has {len(w)} coordinates, {alg.name} has {alg.dim}")
            points.append(bch_multiply(alg, points[-1], GroupPoint(w)))
        return points

    def is_closed(self, alg: StratifiedLieAlgebra) -> bool:
        return self.vertices(alg)[-1] == self.start

    def is_horizontal(self, alg: StratifiedLieAlgebra) -> bool:
        first = set(alg.layer_indices(1))
        return all(c == 0 for w in self.increments for i, c in enumerate(w) if i not in first)


@dataclass
class BoundaryCorrection:
    uncorrected: float  # integral of w
    correction: float  # integral of g theta3
    corrected: float  # integral of w - g theta3
    horizontal: bool


def heisenberg_boundary_correction(rc: RuminComplex, curve: Polyline, omega: Sequence) -> BoundaryCorrection:
    """
    Line integrals of a Rumin 1-form and of its de Rham extension along a closed polyline

    Args:
        rc: complex of heisenberg(1)
        curve: closed polyline
        omega: (f1, f2), polynomial coefficients of theta1 and theta2 in
            exponential coordinates

    Raises:
        ParameterError: rc is not the first Heisenberg complex
        CurveError: the polyline does not close up, or a coefficient is not polynomial
    """
    alg = rc.algebra
    if not _is_heisenberg(alg):
        raise ParameterError(f"boundary correction is defined on heisenberg(1), got {alg.name}")
    if len(omega) != 2:
        raise ParameterError(f"a Rumin 1-form on heisenberg(1) has 2 coefficients, got {len(omega)}")
    vertices = curve.vertices(alg)
    if vertices[-1] != curve.start:
        raise CurveError(f"polyline ends at {tuple(str(c) for c in vertices[-1])}, not at its start")

    symbols = coordinate_symbols(alg)
    f1, f2 = (sympy.sympify(f) for f in omega)
    for f in (f1, f2):
        Polynomial.from_expr(f, symbols)
    frame = left_invariant_frame(alg)
    g = sympy.expand(frame.vector_field(1, f1) - frame.vector_field(0, f2))
    evaluate = [sympy.lambdify([symbols], expr, modules="numpy") for expr in (f1, f2, g)]

    nodes, weights = np.polynomial.legendre.leggauss(settings.QUADRATURE_NODES)
    t = (nodes + 1) / 2
    weights = weights / 2
    law = vectorized_group_law(alg)

    uncorrected = correction = 0.0
    for v, w in zip(vertices, curve.increments):
        if not any(w):
            continue
        base = [np.full(len(t), float(c)) for c in v]
        flow = [t * float(c) for c in w]
        points = [np.broadcast_to(np.asarray(c, dtype=float), t.shape) for c in law(base, flow)]
        values = [np.broadcast_to(np.asarray(e(points), dtype=float), t.shape) for e in evaluate]
        uncorrected += float(weights @ (values[0] * float(w[0]) + values[1] * float(w[1])))
        correction += float(weights @ (values[2] * float(w[2])))

    result = BoundaryCorrection(
        uncorrected=uncorrected,
        correction=correction,
        corrected=uncorrected - correction,
        horizontal=curve.is_horizontal(alg),
    )
    logger.debug("boundary correction over %d pieces: %s", len(curve.increments), result)
    return result
