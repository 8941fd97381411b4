"""
Flat norm of discrete currents

    F(T) = min { M(S) + M(R) : T = S + bR }
         = max { <T, w> : |w| <= 1, |D_c w| <= 1 }

Both sides are linear programs once masses are l1 norms. R ranges over the
(m+1)-currents supported where D_c^m has a full stencil; S over the support
of T and the columns those rows reach.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.core.config import settings
from app.core.errors import CurrentError, LpSolverError, OperatorShapeError
from app.discrete.currents import DiscreteCurrent, _check_basis
from app.discrete.forms import DiscreteForm, check_mode, zero_form
from app.discrete.grid import Grid
from app.discrete.operators import DiscreteOperator, discretize_dc
from app.lp.program import LinearProgram
from app.lp.solver import LpSolution, solve_lp
from app.rumin.complex import RuminComplex

logger = logging.getLogger(__name__)


@dataclass
class FlatNormResult:
    value: object
    S: DiscreteCurrent
    R: DiscreteCurrent
    solution: LpSolution


@dataclass
class FlatNormDualResult:
    value: object
    omega: DiscreteForm
    solution: LpSolution


def _setup(rc: RuminComplex, grid: Grid, T: DiscreteCurrent, mode: Optional[str]) -> Tuple[str, DiscreteOperator, List[int], List[int], Dict[int, object]]:
    if T.grid is not grid:
        raise CurrentError("current does not live on this grid")
    m = T.dimension
    if m >= rc.n:
        raise CurrentError(f"no flat norm for {m}-currents in dimension {rc.n}: there are no ({m + 1})-currents")
    mode = check_mode(mode or settings.DEFAULT_MODE)
    components = _check_basis(rc, T)
    op = discretize_dc(rc, grid, m, mode)
    t = T.vector(components)
    if mode == "exact":
        t = {i: Fraction(v) for i, v in t.items()}
    else:
        t = {i: float(v) for i, v in t.items()}
    r_index = sorted(op.rows)
    s_index = sorted(set(t) | {c for r in r_index for c in op.rows[r]})
    return mode, op, s_index, r_index, t


def flat_norm_primal(rc: RuminComplex, grid: Grid, T: DiscreteCurrent, mode: Optional[str] = None) -> FlatNormResult:
    """
    min sum(s+ + s-) + sum(r+ + r-)  subject to  s+ - s- + D^T (r+ - r-) = t

    Returns:
        FlatNormResult with the value and witnesses S (m-current) and R ((m+1)-current)
    """
    mode, op, s_index, r_index, t = _setup(rc, grid, T, mode)
    one = Fraction(1) if mode == "exact" else 1.0
    ns, nr = len(s_index), len(r_index)
    lp = LinearProgram.with_variables([one] * (2 * ns + 2 * nr), name=f"flat-primal-{T.dimension}")
    s_pos = {i: k for k, i in enumerate(s_index)}
    r_pos = {r: k for k, r in enumerate(r_index)}
    columns = op.columns
    for i in s_index:
        row = {s_pos[i]: one, ns + s_pos[i]: -one}
        for r, v in columns.get(i, {}).items():
            k = r_pos[r]
            row[2 * ns + k] = v
            row[2 * ns + nr + k] = -v
        lp.add_row(row, "==", t.get(i, 0 * one))
    solution = solve_lp(lp, mode)
    if not solution.is_optimal:
        raise LpSolverError(f"flat-norm primal program is {solution.status}")

    x = solution.x
    s = {i: x[k] - x[ns + k] for k, i in enumerate(s_index)}
    r = {i: x[2 * ns + k] - x[2 * ns + nr + k] for k, i in enumerate(r_index)}
    m = T.dimension
    S = DiscreteCurrent.from_vector(grid, m, rc.dim(m), s)
    R = DiscreteCurrent.from_vector(grid, m + 1, rc.dim(m + 1), r)
    logger.debug("flat primal of a %d-current: %s over %d unknowns", m, solution.objective, lp.num_vars)
    return FlatNormResult(solution.objective, S, R, solution)


def flat_norm_dual(rc: RuminComplex, grid: Grid, T: DiscreteCurrent, mode: Optional[str] = None) -> FlatNormDualResult:
    """
    max <T, w>  subject to  -1 <= w <= 1,  -1 <= D_c w <= 1 on full-stencil rows

    w is supported on the same index set as the primal S; its value elsewhere
    does not enter <T, w> or any constraint.
    """
    mode, op, s_index, r_index, t = _setup(rc, grid, T, mode)
    one = Fraction(1) if mode == "exact" else 1.0
    objective = [-t.get(i, 0 * one) for i in s_index]
    lp = LinearProgram.with_variables(objective, [(-one, one)] * len(s_index), name=f"flat-dual-{T.dimension}")
    s_pos = {i: k for k, i in enumerate(s_index)}
    for r in r_index:
        row = {s_pos[c]: v for c, v in op.rows[r].items()}
        lp.add_row(row, "<=", one)
        lp.add_row(row, ">=", -one)
    solution = solve_lp(lp, mode)
    if not solution.is_optimal:
        raise LpSolverError(f"flat-norm dual program is {solution.status}")

    m = T.dimension
    omega = zero_form(rc, grid, m, mode)
    components = rc.dim(m)
    for k, i in enumerate(s_index):
        p, a = divmod(i, components)
        omega.values[p, a] = solution.x[k]
    return FlatNormDualResult(-solution.objective, omega, solution)


def form_flat_norm(rc: RuminComplex, grid: Grid, omega: DiscreteForm):
    """F(w) = max(|w|, |D_c w|), the sup norms taken where they are defined"""
    if omega.grid is not grid:
        raise OperatorShapeError("form does not live on this grid")
    sup = omega.sup_norm()
    if omega.degree >= rc.n:
        return sup
    op = discretize_dc(rc, grid, omega.degree, omega.mode)
    return max(sup, op(omega).sup_norm())
