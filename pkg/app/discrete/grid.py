"""
Anisotropic grids in exponential coordinates

Coordinate i of layer w is sampled with spacing h^w, so a cell has volume
h^Q and the dilation delta_2 maps the grid of spacing h onto the grid of
spacing 2h.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import floor, prod
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import GridError
from app.core.linalg import parse_rational
from app.lie.algebra import StratifiedLieAlgebra, homogeneous_dimension
from app.schemas.current import GridSpec

Interval = Tuple[Fraction, Fraction]


@dataclass(frozen=True, eq=False)
class Grid:
    algebra: StratifiedLieAlgebra
    box: Tuple[Interval, ...]
    h: Fraction

    def __post_init__(self):
        object.__setattr__(self, "h", parse_rational(self.h))
        object.__setattr__(self, "box", tuple((parse_rational(lo), parse_rational(hi)) for lo, hi in self.box))
        if self.h <= 0:
            raise GridError(f"grid spacing must be positive, got {self.h}")
        if len(self.box) != self.algebra.dim:
            raise GridError(f"box has {len(self.box)} intervals, {self.algebra.name} has dimension {self.algebra.dim}")
        for i, (lo, hi) in enumerate(self.box):
            if lo > hi:
                raise GridError(f"coordinate {i + 1}: empty interval [{lo}, {hi}]")

    @classmethod
    def from_spec(cls, algebra: StratifiedLieAlgebra, spec: GridSpec) -> "Grid":
        return cls(algebra, tuple((lo, hi) for lo, hi in spec.box), spec.h)

    @classmethod
    def centered(cls, algebra: StratifiedLieAlgebra, h, cells: int) -> "Grid":
        """Box [-cells * h^w, cells * h^w] in every coordinate of layer w"""
        h = parse_rational(h)
        return cls(algebra, tuple((-cells * h ** w, cells * h ** w) for w in algebra.layers), h)

    def to_spec(self) -> GridSpec:
        return GridSpec(box=[[str(lo), str(hi)] for lo, hi in self.box], h=str(self.h))

    # ==================== Geometry ====================

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @cached_property
    def spacing(self) -> Tuple[Fraction, ...]:
        return tuple(self.h ** w for w in self.algebra.layers)

    @cached_property
    def shape(self) -> Tuple[int, ...]:
        return tuple(floor((hi - lo) / sp) + 1 for (lo, hi), sp in zip(self.box, self.spacing))

    @property
    def size(self) -> int:
        return prod(self.shape)

    @cached_property
    def cell_volume(self) -> Fraction:
        return self.h ** homogeneous_dimension(self.algebra)

    def refine(self) -> "Grid":
        return Grid(self.algebra, self.box, self.h / 2)

    # ==================== Indexing ====================

    def flat_index(self, multi: Sequence[int]) -> int:
        if len(multi) != self.dim or any(not 0 <= k < s for k, s in zip(multi, self.shape)):
            raise GridError(f"multi-index {tuple(multi)} outside grid shape {self.shape}")
        return int(np.ravel_multi_index(tuple(multi), self.shape))

    def multi_index(self, flat: int) -> Tuple[int, ...]:
        return tuple(int(k) for k in np.unravel_index(flat, self.shape))

    def point(self, flat: int) -> Tuple[Fraction, ...]:
        """Exact coordinates of a grid point"""
        return tuple(lo + k * sp for k, (lo, _), sp in zip(self.multi_index(flat), self.box, self.spacing))

    @cached_property
    def exact_points(self) -> List[Tuple[Fraction, ...]]:
        return [self.point(p) for p in range(self.size)]

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Float coordinates, shape (size, dim), C order"""
        axes = [
            float(lo) + np.arange(s) * float(sp)
            for (lo, _), s, sp in zip(self.box, self.shape, self.spacing)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def margins(self) -> np.ndarray:
        """Per point, the number of cells to the nearest box face"""
        index = np.indices(self.shape).reshape(self.dim, -1)
        upper = np.array(self.shape).reshape(-1, 1) - 1 - index
        return np.minimum(index, upper).min(axis=0)

    def margin(self, flat: int) -> int:
        return int(self.margins[flat])

    def interior(self, margin: int) -> np.ndarray:
        return np.flatnonzero(self.margins >= margin)

    def snap(self, coords: Sequence) -> Optional[int]:
        """Nearest grid point (halves round up) or None outside the grid"""
        multi = []
        for x, (lo, _), sp, s in zip(coords, self.box, self.spacing, self.shape):
            if isinstance(x, (int, Fraction)):
                k = floor((Fraction(x) - lo) / sp + Fraction(1, 2))
            else:
                k = int(np.floor((float(x) - float(lo)) / float(sp) + 0.5))
            if not 0 <= k < s:
                return None
            multi.append(k)
        return self.flat_index(multi)

    def snap_array(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized snap of an (N, dim) array; -1 marks points outside"""
        coords = np.asarray(coords, dtype=float)
        lo = np.array([float(lo) for lo, _ in self.box])
        sp = np.array([float(s) for s in self.spacing])
        multi = np.floor((coords - lo) / sp + 0.5).astype(np.int64)
        shape = np.array(self.shape)
        inside = np.all((multi >= 0) & (multi < shape), axis=1)
        out = np.full(coords.shape[0], -1, dtype=np.int64)
        if inside.any():
            out[inside] = np.ravel_multi_index(tuple(multi[inside].T), self.shape)
        return out

    def points_in_box(self, box: Iterable[Interval]) -> List[int]:
        """Grid points whose exact coordinates lie in a closed box"""
        box = [(parse_rational(lo), parse_rational(hi)) for lo, hi in box]
        return [
            p for p, x in enumerate(self.exact_points)
            if all(lo <= xi <= hi for xi, (lo, hi) in zip(x, box))
        ]

    def __repr__(self) -> str:
        return f"Grid({self.algebra.name}, h={self.h}, shape={self.shape})"
