"""
LP solving with dual certificates

Exact mode runs the Fraction simplex with Bland's rule; float mode runs
HiGHS dual simplex (scipy.optimize.linprog, method "highs-ds") with
steepest-edge pricing. Both report the primal point, the row duals y in the
convention

    max b.y + sum_j bound_j d_j,   d = c - A^T y,
    y_i <= 0 on "<=" rows, y_i >= 0 on ">=" rows,

the reduced costs d, both objective values and the complementary slackness
residual.
"""
import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from app.core.config import settings
from app.core.errors import LpSolverError, LpStatusError, ParameterError
from app.lp.program import LinearProgram, Number, to_standard_form
from app.lp.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_standard_form

logger = logging.getLogger(__name__)

MODES = ("exact", "float")
PIVOT_RULES = {"exact": "bland", "float": "steepest-edge"}

_dump_counter = itertools.count()


@dataclass
class LpSolution:
    status: str
    mode: str
    x: Optional[List[Number]] = None
    y: Optional[List[Number]] = None
    reduced_costs: Optional[List[Number]] = None
    objective: Optional[Number] = None
    dual_objective: Optional[Number] = None
    slackness: Optional[Number] = None
    pivot_rule: str = ""
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


# ==================== Certificates ====================

def _reduced_costs(lp: LinearProgram, y: List[Number]) -> List[Number]:
    d = list(lp.c)
    for i, row in enumerate(lp.rows):
        if y[i]:
            for j, v in row.items():
                d[j] = d[j] - v * y[i]
    return d


def _dual_objective(lp: LinearProgram, y: List[Number], d: List[Number]) -> Number:
    total = sum((bi * yi for bi, yi in zip(lp.b, y)), 0)
    for (lo, hi), dj in zip(lp.bounds, d):
        if dj > 0:
            total += (lo if lo is not None else 0) * dj
        elif dj < 0:
            total += (hi if hi is not None else 0) * dj
    return total


def _slackness(lp: LinearProgram, x: List[Number], y: List[Number], d: List[Number]) -> Number:
    """
    sum |y_i (a_i.x - b_i)| + sum |d_j (x_j - active bound)|

    A nonzero d_j whose active bound is infinite contributes |d_j|.
    """
    total = 0
    for i in range(lp.num_rows):
        if y[i]:
            total += abs(y[i] * (lp.activity(i, x) - lp.b[i]))
    for j, dj in enumerate(d):
        if not dj:
            continue
        lo, hi = lp.bounds[j]
        bound = lo if dj > 0 else hi
        total += abs(dj) if bound is None else abs(dj * (x[j] - bound))
    return total


# ==================== Exact ====================

def _solve_exact(lp: LinearProgram) -> LpSolution:
    sf = to_standard_form(lp)
    result = solve_standard_form(sf, settings.EXACT_LP_MAX_PIVOTS)
    solution = LpSolution(
        status=result.status,
        mode="exact",
        pivot_rule=PIVOT_RULES["exact"],
        iterations=result.pivots,
    )
    if result.status != OPTIMAL:
        return solution
    x = sf.original_point(result.z)
    y = [sf.row_sign[i] * result.row_duals[i] for i in range(lp.num_rows)]
    d = _reduced_costs(lp, y)
    solution.x = x
    solution.y = y
    solution.reduced_costs = d
    solution.objective = result.objective
    solution.dual_objective = _dual_objective(lp, y, d)
    solution.slackness = _slackness(lp, x, y, d)
    return solution


# ==================== Float ====================

def _sparse(rows, ncols: int) -> Optional[csr_matrix]:
    if not rows:
        return None
    data, indices, indptr = [], [], [0]
    for row in rows:
        for j, v in sorted(row.items()):
            indices.append(j)
            data.append(float(v))
        indptr.append(len(indices))
    return csr_matrix((data, indices, indptr), shape=(len(rows), ncols))


def _solve_float(lp: LinearProgram) -> LpSolution:
    tol = settings.FLOAT_LP_TOLERANCE
    upper_rows, upper_rhs, upper_index, upper_sign = [], [], [], []
    equal_rows, equal_rhs, equal_index = [], [], []
    for i, (row, sense, rhs) in enumerate(zip(lp.rows, lp.senses, lp.b)):
        if sense == "==":
            equal_rows.append(row)
            equal_rhs.append(float(rhs))
            equal_index.append(i)
        else:
            sign = 1.0 if sense == "<=" else -1.0
            upper_rows.append({j: sign * float(v) for j, v in row.items()})
            upper_rhs.append(sign * float(rhs))
            upper_index.append(i)
            upper_sign.append(sign)

    bounds = [
        (None if lo is None else float(lo), None if hi is None else float(hi))
        for lo, hi in lp.bounds
    ]

    def run(presolve: bool):
        return linprog(
            np.array([float(v) for v in lp.c]),
            A_ub=_sparse(upper_rows, lp.num_vars),
            b_ub=np.array(upper_rhs) if upper_rows else None,
            A_eq=_sparse(equal_rows, lp.num_vars),
            b_eq=np.array(equal_rhs) if equal_rows else None,
            bounds=bounds,
            method="highs-ds",
            options={
                "presolve": presolve,
                "primal_feasibility_tolerance": tol,
                "dual_feasibility_tolerance": tol,
                "simplex_dual_edge_weight_strategy": "steepest",
            },
        )

    result = run(presolve=True)
    if result.status == 4 and "unbounded or infeasible" in str(result.message).lower():
        # presolve cannot tell the two apart; the simplex itself can
        logger.debug("presolve left %s undecided; solving again without it", lp.name)
        result = run(presolve=False)
    iterations = int(getattr(result, "nit", 0) or 0)
    if result.status == 2:
        return LpSolution(INFEASIBLE, "float", pivot_rule=PIVOT_RULES["float"], iterations=iterations)
    if result.status == 3:
        return LpSolution(UNBOUNDED, "float", pivot_rule=PIVOT_RULES["float"], iterations=iterations)
    if result.status != 0:
        raise LpSolverError(f"HiGHS failed on {lp.name}: status {result.status}, {result.message}")

    y = [0.0] * lp.num_rows
    if upper_rows:
        for i, sign, mu in zip(upper_index, upper_sign, result.ineqlin.marginals):
            y[i] = float(sign * mu)
    if equal_rows:
        for i, mu in zip(equal_index, result.eqlin.marginals):
            y[i] = float(mu)
    x = [float(v) for v in result.x]
    d = _reduced_costs(lp, y)
    scale = max([1.0] + [abs(float(v)) for v in lp.c])
    d = [0.0 if abs(v) <= tol * scale else float(v) for v in d]
    return LpSolution(
        status=OPTIMAL,
        mode="float",
        x=x,
        y=y,
        reduced_costs=d,
        objective=float(result.fun),
        dual_objective=float(_dual_objective(lp, y, d)),
        slackness=float(_slackness(lp, x, y, d)),
        pivot_rule=PIVOT_RULES["float"],
        iterations=iterations,
    )


# ==================== Entry points ====================

def _dump(lp: LinearProgram) -> None:
    directory = Path(settings.LP_DEBUG_DUMP_DIR)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{lp.name}-{next(_dump_counter):05d}.lp"
    path.write_text(lp.to_lp_format())
    logger.debug("dumped %s to %s", lp.name, path)


def solve_lp(lp: LinearProgram, mode: Optional[str] = None) -> LpSolution:
    """
    Solve a linear program and attach a dual certificate

    Args:
        lp: the program
        mode: "exact" (Fractions, Bland) or "float" (HiGHS); settings.DEFAULT_MODE
            when omitted

    Returns:
        LpSolution with status optimal, infeasible or unbounded

    Raises:
        LpSolverError: HiGHS breakdown or exhausted pivot budget
    """
    mode = mode or settings.DEFAULT_MODE
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if settings.LP_DEBUG_DUMP_DIR:
        _dump(lp)
    if mode == "exact":
        if not lp.is_exact:
            logger.debug("%s has float data; converting it to exact binary fractions", lp.name)
        solution = _solve_exact(lp)
    else:
        solution = _solve_float(lp)
    logger.info(
        "solved %s (%d vars, %d rows) in %s mode: %s after %d iteration(s)",
        lp.name, lp.num_vars, lp.num_rows, mode, solution.status, solution.iterations,
    )
    return solution


def duality_gap(solution: LpSolution) -> Number:
    """
    |primal - dual| objective difference of an optimal solution; 0 in exact mode

    Raises:
        LpStatusError: when the solution is not optimal
    """
    if not solution.is_optimal:
        raise LpStatusError(f"no duality gap for a {solution.status} program")
    gap = abs(solution.objective - solution.dual_objective)
    return gap if solution.mode == "exact" else float(gap)


def gap_within_tolerance(solution: LpSolution) -> bool:
    """Exact: gap is 0; float: gap <= tol * (1 + |value|)"""
    gap = duality_gap(solution)
    if solution.mode == "exact":
        return gap == 0
    return gap <= settings.FLOAT_LP_TOLERANCE * (1 + abs(float(solution.objective)))
