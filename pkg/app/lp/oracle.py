"""
Exhaustive basic-feasible-solution enumeration

A test oracle for small programs: the standard form's dependent rows are
dropped, then every column subset of the right size that forms a
nonsingular basis with a nonnegative solution is evaluated. For a program
whose optimum is attained this is the optimum.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import List, Optional

from sympy import Matrix
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from app.core.errors import ParameterError
from app.core.linalg import independent_rows
from app.lp.program import LinearProgram, to_standard_form


@dataclass
class OracleResult:
    value: Optional[Fraction]      # None when no basic feasible solution exists
    x: Optional[List[Fraction]]
    bases_checked: int
    feasible_bases: int


def _qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def brute_force_optimum(lp: LinearProgram, max_bases: int = 200000) -> OracleResult:
    """
    Minimum of the objective over all basic feasible solutions

    Args:
        lp: program (converted exactly to standard form)
        max_bases: refuse programs with more candidate bases than this

    Raises:
        ParameterError: when the enumeration would exceed max_bases
    """
    sf = to_standard_form(lp)
    n = sf.num_vars
    dense = [[row.get(j, Fraction(0)) for j in range(n)] for row in sf.A]

    keep = independent_rows(Matrix(sf.num_rows, n, [v for row in dense for v in row])) if dense else []
    if dense:
        # dependent rows must be implied, otherwise nothing is feasible
        augmented = Matrix([row + [sf.b[i]] for i, row in enumerate(dense)])
        if augmented.rank() != len(keep):
            return OracleResult(None, None, 0, 0)
    rows = [dense[i] for i in keep]
    rhs = [sf.b[i] for i in keep]
    m = len(rows)

    if comb(n, m) > max_bases:
        raise ParameterError(f"{comb(n, m)} candidate bases exceed the oracle budget {max_bases}")

    best_value: Optional[Fraction] = None
    best_z: Optional[List[Fraction]] = None
    checked = feasible = 0
    b_vector = DomainMatrix([[_qq(v)] for v in rhs], (m, 1), QQ) if m else None
    for columns in combinations(range(n), m):
        checked += 1
        z = [Fraction(0)] * n
        if m:
            basis = DomainMatrix([[_qq(rows[i][j]) for j in columns] for i in range(m)], (m, m), QQ)
            try:
                solution = basis.lu_solve(b_vector)
            except DMNonInvertibleMatrixError:
                continue
            values = [solution[i, 0].element for i in range(m)]
            if any(v < 0 for v in values):
                continue
            for j, v in zip(columns, values):
                z[j] = Fraction(int(v.numerator), int(v.denominator))
        feasible += 1
        value = sum((cj * zj for cj, zj in zip(sf.c, z)), Fraction(0)) + sf.offset
        if best_value is None or value < best_value:
            best_value, best_z = value, z

    x = sf.original_point(best_z) if best_z is not None else None
    return OracleResult(best_value, x, checked, feasible)
