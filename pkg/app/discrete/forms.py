"""
Sampled Rumin forms

A DiscreteForm of degree k holds, per grid point, the coefficients of a
form in the E0^k basis of the complex. Float forms use float64 arrays;
exact forms use object arrays of Fractions.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy

from app.core.errors import OperatorShapeError, ParameterError
from app.discrete.grid import Grid
from app.lie.frame import Polynomial
from app.lie.group import coordinate_symbols
from app.rumin.complex import RuminComplex

MODES = ("exact", "float")


@dataclass(frozen=True, eq=False)
class DiscreteForm:
    grid: Grid
    degree: int
    values: np.ndarray
    margin: int = 0  # values are meaningful at points at least this far from the box faces

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2 or values.shape[0] != self.grid.size:
            raise OperatorShapeError(
                f"form values must have shape ({self.grid.size}, e), got {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def mode(self) -> str:
        return "exact" if self.values.dtype == object else "float"

    @property
    def components(self) -> int:
        return self.values.shape[1]

    def vector(self) -> np.ndarray:
        """Flattened values, index point * e + basis"""
        return self.values.reshape(-1)

    def valid_points(self) -> np.ndarray:
        return self.grid.interior(self.margin)

    def sup_norm(self):
        """max |coefficient| over valid points (coordinate l-infinity fiber norm)"""
        points = self.valid_points()
        if len(points) == 0 or self.components == 0:
            return Fraction(0) if self.mode == "exact" else 0.0
        block = self.values[points]
        if self.mode == "exact":
            return max(abs(v) for v in block.ravel())
        return float(np.abs(block).max())

    def as_float(self) -> "DiscreteForm":
        if self.mode == "float":
            return self
        return DiscreteForm(self.grid, self.degree, self.values.astype(float), self.margin)

    def _combine(self, other: "DiscreteForm", sign: int) -> "DiscreteForm":
        if not isinstance(other, DiscreteForm):
            return NotImplemented
        if other.grid is not self.grid or other.degree != self.degree:
            raise OperatorShapeError("forms live on different grids or degrees")
        return DiscreteForm(self.grid, self.degree, self.values + sign * other.values,
                            max(self.margin, other.margin))

    def __add__(self, other: "DiscreteForm") -> "DiscreteForm":
        return self._combine(other, 1)

    def __sub__(self, other: "DiscreteForm") -> "DiscreteForm":
        return self._combine(other, -1)

    def __mul__(self, scalar) -> "DiscreteForm":
        return DiscreteForm(self.grid, self.degree, self.values * scalar, self.margin)

    __rmul__ = __mul__

    def __neg__(self) -> "DiscreteForm":
        return self * -1


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def zero_form(rc: RuminComplex, grid: Grid, degree: int, mode: str = "float") -> DiscreteForm:
    check_mode(mode)
    shape = (grid.size, rc.dim(degree))
    if mode == "exact":
        values = np.full(shape, Fraction(0), dtype=object)
    else:
        values = np.zeros(shape)
    return DiscreteForm(grid, degree, values)


def sample_form(
    rc: RuminComplex,
    grid: Grid,
    degree: int,
    coefficients: Sequence,
    mode: str = "float",
) -> DiscreteForm:
    """
    Sample a form given by coefficient functions of the exponential coordinates

    Args:
        rc: complex fixing the E0^degree basis
        grid: sampling grid
        degree: form degree
        coefficients: one sympy expression per E0 basis vector, in the symbols
            of coordinate_symbols(algebra); exact mode needs polynomials
        mode: "exact" or "float"
    """
    check_mode(mode)
    if len(coefficients) != rc.dim(degree):
        raise OperatorShapeError(
            f"E0^{degree} has dimension {rc.dim(degree)}, got {len(coefficients)} coefficients"
        )
    symbols = coordinate_symbols(rc.algebra)
    form = zero_form(rc, grid, degree, mode)
    for a, expr in enumerate(coefficients):
        expr = sympy.sympify(expr)
        if mode == "exact":
            poly = Polynomial.from_expr(expr, symbols)
            form.values[:, a] = [poly.evaluate_exact(x) for x in grid.exact_points]
        else:
            evaluate = sympy.lambdify([symbols], expr, modules="numpy")
            column = evaluate(grid.coordinates.T)
            form.values[:, a] = np.broadcast_to(np.asarray(column, dtype=float), (grid.size,))
    return form


def random_form(
    rc: RuminComplex,
    grid: Grid,
    degree: int,
    rng: np.random.Generator,
    mode: str = "float",
    scale: Optional[int] = None,
) -> DiscreteForm:
    """Seeded random coefficients: quarters in [-scale, scale] (exact) or standard normals (float)"""
    check_mode(mode)
    shape = (grid.size, rc.dim(degree))
    if mode == "exact":
        scale = scale or 4
        draws = rng.integers(-4 * scale, 4 * scale + 1, size=shape)
        values = np.array([[Fraction(int(v), 4) for v in row] for row in draws], dtype=object)
        values = values.reshape(shape)
    else:
        values = rng.standard_normal(shape)
    return DiscreteForm(grid, degree, values)
