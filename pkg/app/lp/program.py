"""
Linear programs

A LinearProgram is

    min c.x  subject to  a_i.x (<= | >= | ==) b_i,  lo_j <= x_j <= hi_j

with sparse rows and None for an infinite bound. Data are Fractions (or
ints) for exact solves and may be floats for the HiGHS path.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.core.errors import LpInputError

Number = Union[int, float, Fraction]
Bound = Tuple[Optional[Number], Optional[Number]]

SENSES = ("<=", ">=", "==")
NONNEGATIVE: Bound = (0, None)
FREE: Bound = (None, None)


@dataclass
class LinearProgram:
    c: List[Number]
    rows: List[Dict[int, Number]] = field(default_factory=list)
    senses: List[str] = field(default_factory=list)
    b: List[Number] = field(default_factory=list)
    bounds: List[Bound] = field(default_factory=list)
    name: str = "lp"

    def __post_init__(self):
        self.c = list(self.c)
        if not self.bounds:
            self.bounds = [NONNEGATIVE] * len(self.c)
        self.validate()

    # ==================== Building ====================

    @classmethod
    def with_variables(cls, c: Sequence[Number], bounds: Optional[Sequence[Bound]] = None, name: str = "lp") -> "LinearProgram":
        return cls(c=list(c), bounds=list(bounds) if bounds is not None else [], name=name)

    def add_row(self, coefficients: Dict[int, Number], sense: str, rhs: Number) -> int:
        """Append a constraint and return its index"""
        if sense not in SENSES:
            raise LpInputError(f"unknown constraint sense {sense!r}")
        for j in coefficients:
            if not 0 <= j < self.num_vars:
                raise LpInputError(f"row references variable {j}, program has {self.num_vars}")
        self.rows.append({j: v for j, v in coefficients.items() if v != 0})
        self.senses.append(sense)
        self.b.append(rhs)
        return len(self.rows) - 1

    def validate(self) -> None:
        n = len(self.c)
        if not (len(self.rows) == len(self.senses) == len(self.b)):
            raise LpInputError(
                f"{len(self.rows)} rows, {len(self.senses)} senses and {len(self.b)} right-hand sides"
            )
        if len(self.bounds) != n:
            raise LpInputError(f"{len(self.bounds)} bounds for {n} variables")
        for sense in self.senses:
            if sense not in SENSES:
                raise LpInputError(f"unknown constraint sense {sense!r}")
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                if not 0 <= j < n:
                    raise LpInputError(f"row {i} references variable {j}, program has {n}")
                _require_finite(v, f"A[{i}, {j}]")
        for v in list(self.c) + list(self.b):
            _require_finite(v, "objective / right-hand side")
        for j, (lo, hi) in enumerate(self.bounds):
            for v in (lo, hi):
                if v is not None:
                    _require_finite(v, f"bound of x{j}")
            if lo is not None and hi is not None and lo > hi:
                raise LpInputError(f"x{j}: lower bound {lo} exceeds upper bound {hi}")

    # ==================== Queries ====================

    @property
    def num_vars(self) -> int:
        return len(self.c)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def is_exact(self) -> bool:
        values = list(self.c) + list(self.b)
        values += [v for row in self.rows for v in row.values()]
        values += [v for bound in self.bounds for v in bound if v is not None]
        return all(isinstance(v, (int, Fraction)) for v in values)

    def objective_value(self, x: Sequence[Number]) -> Number:
        return sum((cj * xj for cj, xj in zip(self.c, x)), 0)

    def activity(self, i: int, x: Sequence[Number]) -> Number:
        return sum((v * x[j] for j, v in self.rows[i].items()), 0)

    def dense_matrix(self) -> List[List[Number]]:
        matrix = [[0] * self.num_vars for _ in self.rows]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                matrix[i][j] = v
        return matrix

    # ==================== Conversions ====================

    def to_standard_form(self) -> "StandardForm":
        return to_standard_form(self)

    def to_lp_format(self) -> str:
        return to_lp_format(self)


def _require_finite(value: Number, what: str) -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise LpInputError(f"{what} is not finite: {value}")


# ==================== Standard form ====================

@dataclass
class StandardForm:
    """
    min c.z + offset  subject to  A z = b,  z >= 0,  b >= 0

    `recover[j]` lists (column, coefficient) pairs and `shift[j]` the constant
    so that x_j = shift[j] + sum coefficient * z_column. `row_sign[i]` is -1
    when original row i was negated to make its right-hand side nonnegative;
    rows past the original ones encode finite upper bounds.
    """

    c: List[Fraction]
    A: List[Dict[int, Fraction]]
    b: List[Fraction]
    offset: Fraction
    recover: List[List[Tuple[int, Fraction]]]
    shift: List[Fraction]
    row_sign: List[int]
    slack_of_row: Dict[int, int]
    num_original_rows: int

    @property
    def num_vars(self) -> int:
        return len(self.c)

    @property
    def num_rows(self) -> int:
        return len(self.b)

    def original_point(self, z: Sequence[Fraction]) -> List[Fraction]:
        return [
            self.shift[j] + sum((coef * z[col] for col, coef in self.recover[j]), Fraction(0))
            for j in range(len(self.recover))
        ]


def to_standard_form(lp: LinearProgram) -> StandardForm:
    """
    Shift, negate or split variables to z >= 0, add slacks and bound rows,
    and flip rows so that b >= 0. Exact: floats are converted to Fractions.
    """
    c: List[Fraction] = []
    recover: List[List[Tuple[int, Fraction]]] = []
    shift: List[Fraction] = []
    upper_rows: List[Tuple[int, Fraction]] = []

    def new_column(cost: Fraction) -> int:
        c.append(cost)
        return len(c) - 1

    offset = Fraction(0)
    for j, (lo, hi) in enumerate(lp.bounds):
        cj = Fraction(lp.c[j])
        if lo is not None:
            col = new_column(cj)
            recover.append([(col, Fraction(1))])
            shift.append(Fraction(lo))
            if hi is not None:
                upper_rows.append((col, Fraction(hi) - Fraction(lo)))
        elif hi is not None:
            col = new_column(-cj)
            recover.append([(col, Fraction(-1))])
            shift.append(Fraction(hi))
        else:
            plus = new_column(cj)
            minus = new_column(-cj)
            recover.append([(plus, Fraction(1)), (minus, Fraction(-1))])
            shift.append(Fraction(0))
        offset += cj * shift[j]

    A: List[Dict[int, Fraction]] = []
    b: List[Fraction] = []
    senses: List[str] = []
    for i, row in enumerate(lp.rows):
        coefficients: Dict[int, Fraction] = {}
        rhs = Fraction(lp.b[i])
        for j, v in row.items():
            v = Fraction(v)
            rhs -= v * shift[j]
            for col, coef in recover[j]:
                coefficients[col] = coefficients.get(col, Fraction(0)) + v * coef
        A.append({k: v for k, v in coefficients.items() if v})
        b.append(rhs)
        senses.append(lp.senses[i])
    for col, width in upper_rows:
        A.append({col: Fraction(1)})
        b.append(width)
        senses.append("<=")

    slack_of_row: Dict[int, int] = {}
    for i, sense in enumerate(senses):
        if sense == "==":
            continue
        col = new_column(Fraction(0))
        A[i][col] = Fraction(1) if sense == "<=" else Fraction(-1)
        slack_of_row[i] = col

    row_sign = []
    for i in range(len(A)):
        if b[i] < 0:
            A[i] = {k: -v for k, v in A[i].items()}
            b[i] = -b[i]
            row_sign.append(-1)
        else:
            row_sign.append(1)

    return StandardForm(
        c=c,
        A=A,
        b=b,
        offset=offset,
        recover=recover,
        shift=shift,
        row_sign=row_sign,
        slack_of_row=slack_of_row,
        num_original_rows=lp.num_rows,
    )


# ==================== CPLEX LP text ====================

def _number(value: Number) -> str:
    return format(float(value), ".17g")


def _linear(terms: Dict[int, Number]) -> str:
    parts = []
    for j, v in sorted(terms.items()):
        if v == 0:
            continue
        sign = "-" if v < 0 else "+"
        parts.append(f"{sign} {_number(abs(v))} x{j}")
    if not parts:
        return "0 x0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def to_lp_format(lp: LinearProgram) -> str:
    """Dump in CPLEX LP format for cross-checking with external solvers"""
    sense_text = {"<=": "<=", ">=": ">=", "==": "="}
    lines = [f"\\ {lp.name}", "Minimize", f" obj: {_linear(dict(enumerate(lp.c)))}", "Subject To"]
    for i, row in enumerate(lp.rows):
        lines.append(f" c{i}: {_linear(row)} {sense_text[lp.senses[i]]} {_number(lp.b[i])}")
    lines.append("Bounds")
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is None and hi is None:
            lines.append(f" x{j} free")
            continue
        low = "-inf" if lo is None else _number(lo)
        high = "+inf" if hi is None else _number(hi)
        lines.append(f" {low} <= x{j} <= {high}")
    lines.append("End")
    return "\n".join(lines) + "\n"
