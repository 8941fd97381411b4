"""
Discrete Rumin currents

An m-current is a finite sum of Dirac coefficients t[(point, a)] against the
E0^m basis; it acts on degree-m forms by <T, w> = sum t[(p, a)] w_a(p). With
the coordinate sup norm on forms its mass is the l1 norm of t, and its
boundary is the transpose of the discretized d_c^(m-1).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from app.core.errors import CurrentError, MarginError, OperatorShapeError
from app.discrete.forms import DiscreteForm
from app.discrete.grid import Grid
from app.discrete.operators import discretize_dc
from app.rumin.complex import RuminComplex, pairing_matrix

Key = Tuple[int, int]  # (flat point index, E0 basis index)


@dataclass(frozen=True, eq=False)
class DiscreteCurrent:
    grid: Grid
    dimension: int
    coefficients: Dict[Key, object] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for (p, a), v in self.coefficients.items():
            if not 0 <= p < self.grid.size:
                raise CurrentError(f"point index {p} outside the grid")
            if a < 0:
                raise CurrentError(f"negative basis index {a}")
            if v:
                cleaned[(int(p), int(a))] = v
        object.__setattr__(self, "coefficients", cleaned)

    @classmethod
    def zero(cls, grid: Grid, dimension: int) -> "DiscreteCurrent":
        return cls(grid, dimension, {})

    @classmethod
    def dirac(cls, grid: Grid, dimension: int, point: int, basis: int, value=Fraction(1)) -> "DiscreteCurrent":
        return cls(grid, dimension, {(point, basis): value})

    # ==================== Structure ====================

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.coefficients.values())

    def support(self) -> List[int]:
        """Grid points carrying a nonzero coefficient"""
        return sorted({p for p, _ in self.coefficients})

    def vector(self, components: int) -> Dict[int, object]:
        """Sparse vector indexed point * components + basis"""
        return {p * components + a: v for (p, a), v in self.coefficients.items()}

    @classmethod
    def from_vector(cls, grid: Grid, dimension: int, components: int, vector: Dict[int, object]) -> "DiscreteCurrent":
        return cls(grid, dimension, {divmod(i, components): v for i, v in vector.items()})

    def as_float(self) -> "DiscreteCurrent":
        return DiscreteCurrent(self.grid, self.dimension, {k: float(v) for k, v in self.coefficients.items()})

    def as_exact(self) -> "DiscreteCurrent":
        return DiscreteCurrent(self.grid, self.dimension, {k: Fraction(v) for k, v in self.coefficients.items()})

    # ==================== Arithmetic ====================

    def _check_compatible(self, other: "DiscreteCurrent") -> None:
        if other.grid is not self.grid or other.dimension != self.dimension:
            raise CurrentError("currents live on different grids or dimensions")

    def __add__(self, other: "DiscreteCurrent") -> "DiscreteCurrent":
        self._check_compatible(other)
        out = dict(self.coefficients)
        for k, v in other.coefficients.items():
            out[k] = out.get(k, 0) + v
        return DiscreteCurrent(self.grid, self.dimension, out)

    def __neg__(self) -> "DiscreteCurrent":
        return self * -1

    def __sub__(self, other: "DiscreteCurrent") -> "DiscreteCurrent":
        return self + (-other)

    def __mul__(self, scalar) -> "DiscreteCurrent":
        return DiscreteCurrent(self.grid, self.dimension, {k: v * scalar for k, v in self.coefficients.items()})

    __rmul__ = __mul__

    def pair(self, form: DiscreteForm):
        """<T, w>"""
        if form.grid is not self.grid or form.degree != self.dimension:
            raise OperatorShapeError(f"a {self.dimension}-current pairs with degree-{self.dimension} forms of its grid")
        total = 0
        for (p, a), v in self.coefficients.items():
            total = total + v * form.values[p, a]
        return total


# ==================== Norms ====================

def mass(T: DiscreteCurrent):
    """M(T) = sum |t|, the dual norm of the coordinate sup norm"""
    return sum((abs(v) for v in T.coefficients.values()), Fraction(0) if T.is_exact else 0.0)


def _check_basis(rc: RuminComplex, T: DiscreteCurrent) -> int:
    components = rc.dim(T.dimension)
    bad = [a for _, a in T.coefficients if a >= components]
    if bad:
        raise CurrentError(f"basis index {max(bad)} outside E0^{T.dimension} (dimension {components})")
    return components


def boundary(rc: RuminComplex, grid: Grid, T: DiscreteCurrent, mode: Optional[str] = None) -> DiscreteCurrent:
    """
    d_c-adjoint boundary: <bT, w> = <T, D_c w> for every (m-1)-form w

    Raises:
        CurrentError: for 0-currents
        MarginError: when the support is closer to the box faces than the
            stencil of d_c^(m-1) reaches
    """
    if T.grid is not grid:
        raise CurrentError("current does not live on this grid")
    m = T.dimension
    if m == 0:
        raise CurrentError("0-currents have no boundary")
    components = _check_basis(rc, T)
    mode = mode or ("exact" if T.is_exact else "float")
    op = discretize_dc(rc, grid, m - 1, mode)
    offending = sorted({grid.multi_index(p) for p in T.support() if grid.margin(p) < op.margin})
    if offending:
        raise MarginError(
            f"support of the {m}-current comes within {op.margin} cells of the box faces at {offending}",
            offending,
        )
    image = op.transpose_apply(T.vector(components))
    return DiscreteCurrent.from_vector(grid, m - 1, rc.dim(m - 1), image)


def normal_mass(rc: RuminComplex, grid: Grid, T: DiscreteCurrent, mode: Optional[str] = None):
    """N(T) = M(T) + M(bT); M(T) for 0-currents"""
    if T.dimension == 0:
        return mass(T)
    return mass(T) + mass(boundary(rc, grid, T, mode))


# ==================== Diffuse currents ====================

def diffuse_boundary_sign(n: int, m: int) -> int:
    """b P(phi) = sign * P(d_c phi) for phi of degree n - m"""
    return (-1) ** (n - m + 1)


def diffuse_current(rc: RuminComplex, grid: Grid, phi: DiscreteForm) -> DiscreteCurrent:
    """
    P(phi): w -> Riemann sum of phi ^ w, an m-current for phi of degree n - m

    t[(p, a)] = h^Q * sum_b phi_b(p) <e_b, e_a>
    """
    n = rc.n
    k = phi.degree
    m = n - k
    matrix = pairing_matrix(rc, k)
    volume = grid.cell_volume
    exact = phi.mode == "exact"
    weight = volume if exact else float(volume)
    coefficients: Dict[Key, object] = {}
    for p in phi.valid_points():
        row = phi.values[p]
        for a in range(rc.dim(m)):
            total = 0
            for b in range(rc.dim(k)):
                if matrix[b][a] and row[b]:
                    total = total + row[b] * (matrix[b][a] if exact else float(matrix[b][a]))
            if total:
                coefficients[(int(p), a)] = weight * total
    return DiscreteCurrent(grid, m, coefficients)


def pairing_density(rc: RuminComplex, phi: DiscreteForm) -> np.ndarray:
    """Per point, the l1 norm of w -> phi(p) ^ w; its Riemann sum is M(P(phi))"""
    matrix = pairing_matrix(rc, phi.degree)
    m = rc.n - phi.degree
    out = np.zeros(phi.grid.size, dtype=object if phi.mode == "exact" else float)
    for p in phi.valid_points():
        row = phi.values[p]
        out[p] = sum(
            (abs(sum((row[b] * matrix[b][a] for b in range(rc.dim(phi.degree))), 0)) for a in range(rc.dim(m))),
            0,
        )
    return out


# ==================== Coarsening ====================

def coarsen_current(T: DiscreteCurrent, coarse: Grid) -> DiscreteCurrent:
    """
    Move every coefficient to the nearest coarse point and sum

    Mass does not increase. Raises CurrentError for points outside the coarse box.
    """
    out: Dict[Key, object] = {}
    for (p, a), v in T.coefficients.items():
        target = coarse.snap(T.grid.point(p))
        if target is None:
            raise CurrentError(f"point {T.grid.multi_index(p)} falls outside the coarse grid")
        out[(target, a)] = out.get((target, a), 0) + v
    return DiscreteCurrent(coarse, T.dimension, out)


def current_from_entries(grid: Grid, dimension: int, entries: Iterable[Tuple[Tuple[int, ...], int, object]]) -> DiscreteCurrent:
    """Build from (multi-index, basis, value) triples, summing repeats"""
    out: Dict[Key, object] = {}
    for multi, a, v in entries:
        key = (grid.flat_index(multi), a)
        out[key] = out.get(key, 0) + v
    return DiscreteCurrent(grid, dimension, out)
