"""
Flat-norm covering numbers of bounded-normal-mass currents

At every refinement level h0 / 2^l, random m-currents supported in the box K
are rescaled to normal mass at most nu, moved to the coarsest grid by
coarsen_current, and covered greedily by flat-norm balls of radius epsilon.
A family that is precompact in the flat topology shows covering numbers
that stay bounded as the grid refines.

Randomness: numpy PCG64 seeded with the run seed, consumed level by level in
a fixed order, so a (params, mode) pair fixes the report.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import CurrentError, ParameterError, ProbeBudgetError
from app.core.linalg import parse_rational
from app.discrete.currents import DiscreteCurrent, coarsen_current, normal_mass
from app.discrete.flat import flat_norm_primal
from app.discrete.forms import check_mode
from app.discrete.grid import Grid
from app.discrete.operators import discretize_dc
from app.opalg.operators import max_derivative_order
from app.rumin.complex import RuminComplex
from app.schemas.current import ProbeParams
from app.schemas.report import ProbeLevelReport, ProbeReport

logger = logging.getLogger(__name__)


def probe_grid(rc: RuminComplex, params: ProbeParams, level: int) -> Grid:
    """K padded by enough cells that every K point carries a full boundary stencil"""
    h = parse_rational(params.h) / 2 ** level
    padding = max(settings.PROBE_PADDING_CELLS, max_derivative_order(rc.dc[params.dimension - 1]))
    box = []
    for (lo, hi), w in zip(params.box, rc.algebra.layers):
        pad = padding * h ** w
        box.append((parse_rational(lo) - pad, parse_rational(hi) + pad))
    return Grid(rc.algebra, tuple(box), h)


def random_current(
    rc: RuminComplex,
    grid: Grid,
    support: List[int],
    params: ProbeParams,
    rng: np.random.Generator,
    mode: str,
) -> DiscreteCurrent:
    """Integer coefficients on random K points, rescaled to normal mass nu * u with u in {1/8, ..., 1}"""
    m = params.dimension
    size = min(params.support_size or settings.PROBE_SUPPORT_SIZE, len(support))
    points = rng.choice(len(support), size=size, replace=False)
    coefficients = {}
    for k in points:
        key = (support[int(k)], int(rng.integers(0, rc.dim(m))))
        coefficients[key] = coefficients.get(key, 0) + int(rng.integers(-3, 4))
    target = parse_rational(params.nu) * Fraction(int(rng.integers(1, 9)), 8)
    T = DiscreteCurrent(grid, m, {k: Fraction(v) for k, v in coefficients.items()})
    if T.is_zero or target == 0:
        return DiscreteCurrent.zero(grid, m)
    if mode == "float":
        T = T.as_float()
        return T * (float(target) / normal_mass(rc, grid, T, mode))
    return T * (target / normal_mass(rc, grid, T, mode))


def _distance(rc: RuminComplex, coarse: Grid, pair: Tuple[DiscreteCurrent, DiscreteCurrent], mode: str):
    difference = pair[0] - pair[1]
    if difference.is_zero:
        return Fraction(0) if mode == "exact" else 0.0
    return flat_norm_primal(rc, coarse, difference, mode).value


def greedy_net(distances: List[List[object]], epsilon) -> List[int]:
    """Indices kept in order whenever no kept index lies within epsilon"""
    net: List[int] = []
    for i in range(len(distances)):
        if all(distances[i][j] > epsilon for j in net):
            net.append(i)
    return net


def compactness_probe(
    rc: RuminComplex,
    params: ProbeParams,
    mode: Optional[str] = None,
    timings: bool = False,
) -> ProbeReport:
    """
    Greedy epsilon-net sizes of random currents with N(T) <= nu, per refinement level

    Args:
        rc: complex of the algebra named in params
        params: K box, coarsest h, nu, epsilon, sample count, levels, seed
        mode: "exact" or "float" flat-norm solves; settings.DEFAULT_MODE when omitted
        timings: include per-level wall time (makes reports run-dependent)

    Raises:
        ProbeBudgetError: samples * levels exceeds PROBE_MAX_SAMPLES
        CurrentError: the dimension has no flat norm
    """
    mode = check_mode(mode or settings.DEFAULT_MODE)
    m = params.dimension
    if not 1 <= m < rc.n:
        raise CurrentError(f"probe needs 1 <= m < {rc.n}, got m = {m}")
    if len(params.box) != rc.algebra.dim:
        raise ParameterError(f"K box has {len(params.box)} intervals, {rc.algebra.name} has dimension {rc.algebra.dim}")
    total = params.samples * params.levels
    if total > settings.PROBE_MAX_SAMPLES:
        raise ProbeBudgetError(f"{total} samples requested, PROBE_MAX_SAMPLES is {settings.PROBE_MAX_SAMPLES}")

    epsilon = parse_rational(params.epsilon)
    if mode == "float":
        epsilon = float(epsilon)
    rng = np.random.Generator(np.random.PCG64(params.seed))
    coarse = probe_grid(rc, params, 0)
    discretize_dc(rc, coarse, m, mode)
    levels: List[ProbeLevelReport] = []

    for level in range(params.levels):
        started = time.perf_counter()
        grid = coarse if level == 0 else probe_grid(rc, params, level)
        support = grid.points_in_box(params.box)
        if not support:
            raise ParameterError(f"K box holds no grid point at h = {grid.h}")
        currents = [
            coarsen_current(random_current(rc, grid, support, params, rng, mode), coarse)
            for _ in range(params.samples)
        ]

        pairs = [(i, j) for i in range(len(currents)) for j in range(i)]
        with ThreadPoolExecutor(max_workers=settings.PROBE_WORKERS) as pool:
            values = list(pool.map(lambda ij: _distance(rc, coarse, (currents[ij[0]], currents[ij[1]]), mode), pairs))
        zero = Fraction(0) if mode == "exact" else 0.0
        distances = [[zero] * len(currents) for _ in currents]
        for (i, j), value in zip(pairs, values):
            distances[i][j] = distances[j][i] = value

        net = greedy_net(distances, epsilon)
        report = ProbeLevelReport(
            level=level,
            h=str(grid.h),
            net_size=len(net),
            max_pairwise_flat=str(max(values, default=zero)),
            runtime_ms=int((time.perf_counter() - started) * 1000) if timings else None,
        )
        logger.info("probe level %d (h = %s): net size %d of %d samples", level, grid.h, len(net), len(currents))
        levels.append(report)

    return ProbeReport(
        algebra=rc.algebra.name,
        dimension=m,
        mode=mode,
        nu=str(params.nu),
        epsilon=str(params.epsilon),
        samples=params.samples,
        seed=params.seed,
        levels=levels,
    )
