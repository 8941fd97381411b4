"""
Exact two-phase simplex over Fractions with Bland's rule

Works on a StandardForm (A z = b, z >= 0, b >= 0). Every row starts with a
unit column: an existing +1 column when one is available, an artificial one
otherwise. Artificials never re-enter once they leave and are pivoted out
of the basis after phase 1 where possible; rows where that is impossible
are redundant and stay untouched.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from app.core.errors import LpSolverError
from app.lp.program import StandardForm

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class SimplexResult:
    status: str
    z: Optional[List[Fraction]]
    row_duals: Optional[List[Fraction]]
    reduced_costs: Optional[List[Fraction]]
    objective: Optional[Fraction]
    pivots: int


class _Tableau:
    """Dense Fraction tableau; each row ends with its right-hand side"""

    def __init__(self, sf: StandardForm):
        self.num_structural = sf.num_vars
        m = sf.num_rows
        self.unit_column: List[int] = []
        self.artificial: List[int] = []
        self.rows: List[List[Fraction]] = []

        crash = self._crash_columns(sf)
        num_artificial = sum(1 for col in crash if col is None)
        width = sf.num_vars + num_artificial
        next_artificial = sf.num_vars
        for i in range(m):
            row = [ZERO] * (width + 1)
            for j, v in sf.A[i].items():
                row[j] = v
            row[-1] = sf.b[i]
            col = crash[i]
            if col is None:
                col = next_artificial
                row[col] = ONE
                self.artificial.append(col)
                next_artificial += 1
            self.unit_column.append(col)
            self.rows.append(row)
        self.width = width
        self.basis: List[int] = list(self.unit_column)
        self.cost: List[Fraction] = [ZERO] * (width + 1)
        self.pivots = 0

    @staticmethod
    def _crash_columns(sf: StandardForm) -> List[Optional[int]]:
        """Per row, the first column that is +1 there and 0 in every other row"""
        count = [0] * sf.num_vars
        for row in sf.A:
            for j in row:
                count[j] += 1
        taken = set()
        crash: List[Optional[int]] = []
        for row in sf.A:
            choice = None
            for j in sorted(row):
                if row[j] == 1 and count[j] == 1 and j not in taken:
                    choice = j
                    break
            if choice is not None:
                taken.add(choice)
            crash.append(choice)
        return crash

    def is_artificial(self, col: int) -> bool:
        return col >= self.num_structural

    def price(self, costs: List[Fraction]) -> None:
        """Reduced costs of `costs` against the current basis; cost[-1] = -objective"""
        cost = list(costs) + [ZERO]
        for i, col in enumerate(self.basis):
            factor = cost[col]
            if factor:
                row = self.rows[i]
                for k, v in enumerate(row):
                    if v:
                        cost[k] -= factor * v
        self.cost = cost

    def pivot(self, p: int, q: int) -> None:
        pivot_row = self.rows[p]
        value = pivot_row[q]
        if value != ONE:
            pivot_row = [v / value for v in pivot_row]
            self.rows[p] = pivot_row
        support = [k for k, v in enumerate(pivot_row) if v]
        for i, row in enumerate(self.rows):
            if i == p:
                continue
            factor = row[q]
            if factor:
                for k in support:
                    row[k] -= factor * pivot_row[k]
        factor = self.cost[q]
        if factor:
            for k in support:
                self.cost[k] -= factor * pivot_row[k]
        self.basis[p] = q
        self.pivots += 1

    def entering(self, eligible) -> Optional[int]:
        """Bland: lowest-index eligible column with negative reduced cost"""
        for j in range(self.width):
            if self.cost[j] < 0 and eligible(j):
                return j
        return None

    def leaving(self, q: int) -> Optional[int]:
        """Minimum ratio; ties go to the lowest basic variable index"""
        best = None
        best_ratio = None
        for i, row in enumerate(self.rows):
            if row[q] > 0:
                ratio = row[-1] / row[q]
                if (
                    best is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[best])
                ):
                    best, best_ratio = i, ratio
        return best

    def run(self, eligible, max_pivots: int) -> str:
        while True:
            q = self.entering(eligible)
            if q is None:
                return OPTIMAL
            p = self.leaving(q)
            if p is None:
                return UNBOUNDED
            if self.pivots >= max_pivots:
                raise LpSolverError(f"exact simplex exceeded {max_pivots} pivots")
            self.pivot(p, q)

    def drive_out_artificials(self) -> None:
        for i in range(len(self.rows)):
            if not self.is_artificial(self.basis[i]):
                continue
            row = self.rows[i]
            col = next((j for j in range(self.num_structural) if row[j] != 0), None)
            if col is not None:
                self.pivot(i, col)

    def primal(self) -> List[Fraction]:
        z = [ZERO] * self.num_structural
        for i, col in enumerate(self.basis):
            if col < self.num_structural:
                z[col] = self.rows[i][-1]
        return z


def solve_standard_form(sf: StandardForm, max_pivots: int) -> SimplexResult:
    """
    Two-phase primal simplex with Bland's rule

    Args:
        sf: program in standard form
        max_pivots: total pivot budget over both phases

    Returns:
        SimplexResult; row_duals are the multipliers of the standard-form rows

    Raises:
        LpSolverError: when the pivot budget runs out
    """
    tableau = _Tableau(sf)

    if tableau.artificial:
        phase_one = [ZERO] * sf.num_vars + [ONE] * len(tableau.artificial)
        tableau.price(phase_one)
        tableau.run(lambda j: not tableau.is_artificial(j), max_pivots)
        if -tableau.cost[-1] > 0:
            logger.debug("phase 1 ended with infeasibility %s", -tableau.cost[-1])
            return SimplexResult(INFEASIBLE, None, None, None, None, tableau.pivots)
        tableau.drive_out_artificials()

    costs = list(sf.c) + [ZERO] * len(tableau.artificial)
    tableau.price(costs)
    status = tableau.run(lambda j: not tableau.is_artificial(j), max_pivots)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, None, None, None, tableau.pivots)

    reduced = tableau.cost[: sf.num_vars]
    # r_u = c_u - y_i for the unit column u of row i
    row_duals = [costs[u] - tableau.cost[u] for u in tableau.unit_column]
    z = tableau.primal()
    objective = -tableau.cost[-1] + sf.offset
    return SimplexResult(OPTIMAL, z, row_duals, reduced, objective, tableau.pivots)
