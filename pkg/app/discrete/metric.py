"""
Grid approximation of the Carnot-Caratheodory distance
"""
import logging
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from app.core.errors import CCDistanceError, GridError
from app.discrete.grid import Grid
from app.lie.algebra import StratifiedLieAlgebra
from app.lie.group import vectorized_group_law
from app.schemas.current import GridSpec

logger = logging.getLogger(__name__)


def horizontal_graph(grid: Grid) -> sparse.csr_matrix:
    """
    Edges p -> snap(p * exp(+-h e_i)) for every layer-1 generator e_i, length h

    Moves leaving the box are dropped, as are moves snapping back onto p.
    Equal grids share one graph.
    """
    return _horizontal_graph(grid.algebra, grid.to_spec().model_dump_json())


@lru_cache(maxsize=16)
def _horizontal_graph(alg: StratifiedLieAlgebra, grid_key: str) -> sparse.csr_matrix:
    grid = Grid.from_spec(alg, GridSpec.model_validate_json(grid_key))
    law = vectorized_group_law(alg)
    coords = grid.coordinates
    h = float(grid.h)
    sources, targets = [], []
    for i in alg.layer_indices(1):
        for sign in (1.0, -1.0):
            step = np.zeros((grid.size, alg.dim))
            step[:, i] = sign * h
            product = law(list(coords.T), list(step.T))
            moved = np.stack([np.broadcast_to(np.asarray(c, dtype=float), (grid.size,)) for c in product], axis=1)
            snapped = grid.snap_array(moved)
            keep = (snapped >= 0) & (snapped != np.arange(grid.size))
            sources.append(np.flatnonzero(keep))
            targets.append(snapped[keep])
    pairs = np.unique(np.stack([np.concatenate(sources), np.concatenate(targets)], axis=1), axis=0)
    weights = np.full(len(pairs), h)
    graph = sparse.csr_matrix((weights, (pairs[:, 0], pairs[:, 1])), shape=(grid.size, grid.size))
    logger.debug("horizontal graph on %s: %d edges", grid, len(pairs))
    return graph


def cc_distance(alg: StratifiedLieAlgebra, grid: Grid, p: int, q: int) -> float:
    """
    Shortest horizontal grid path from p to q (flat point indices)

    An upper approximation of the CC distance up to discretization.

    Raises:
        CCDistanceError: q cannot be reached from p inside the box
    """
    if grid.algebra is not alg:
        raise GridError(f"grid of {grid.algebra.name} used with {alg.name}")
    for index in (p, q):
        if not 0 <= index < grid.size:
            raise GridError(f"point index {index} outside the grid")
    if p == q:
        return 0.0
    distances = dijkstra(horizontal_graph(grid), directed=True, indices=p)
    value = float(distances[q])
    if not np.isfinite(value):
        raise CCDistanceError(
            f"{grid.multi_index(q)} is not reachable from {grid.multi_index(p)} by horizontal moves inside the box"
        )
    return value
