import math
from fractions import Fraction

import numpy as np
import pytest

from app.core.config import settings
from app.core.errors import LpInputError, LpStatusError, ParameterError
from app.lp.oracle import brute_force_optimum
from app.lp.program import FREE, NONNEGATIVE, LinearProgram
from app.lp.solver import duality_gap, gap_within_tolerance, solve_lp

SEEDS = range(25)


def at_least_three():
    lp = LinearProgram.with_variables([1], name="at-least-three")
    lp.add_row({0: 1}, ">=", 3)
    return lp


def absolute_value_of_five():
    """min t+ + t- with t = t+ - t- = 5"""
    lp = LinearProgram.with_variables([1, 1, 0], [NONNEGATIVE, NONNEGATIVE, FREE], name="split")
    lp.add_row({0: 1, 1: -1, 2: -1}, "==", 0)
    lp.add_row({2: 1}, "==", 5)
    return lp


def random_program(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    lp = LinearProgram.with_variables([int(v) for v in rng.integers(0, 6, size=6)], name=f"random-{seed}")
    for _ in range(4):
        row = {j: int(v) for j, v in enumerate(rng.integers(-3, 4, size=6))}
        lp.add_row(row, str(rng.choice(["<=", ">=", "=="])), int(rng.integers(-5, 6)))
    return lp


# ==================== Small programs ====================

@pytest.mark.parametrize("mode", ["exact", "float"])
def test_lower_bound(mode):
    solution = solve_lp(at_least_three(), mode)
    assert solution.is_optimal
    assert solution.objective == pytest.approx(3)
    assert solution.x[0] == pytest.approx(3)
    assert gap_within_tolerance(solution)


def test_exact_solution_is_rational():
    solution = solve_lp(at_least_three(), "exact")
    assert solution.objective == Fraction(3)
    assert solution.y == [Fraction(1)]
    assert solution.slackness == 0
    assert solution.pivot_rule == "bland"
    assert duality_gap(solution) == 0


@pytest.mark.parametrize("mode", ["exact", "float"])
def test_split_absolute_value(mode):
    solution = solve_lp(absolute_value_of_five(), mode)
    assert solution.objective == pytest.approx(5)
    assert solution.x[2] == pytest.approx(5)
    assert gap_within_tolerance(solution)


@pytest.mark.parametrize("mode", ["exact", "float"])
def test_infeasible_program(mode):
    lp = LinearProgram.with_variables([1])
    lp.add_row({0: 1}, "<=", 1)
    lp.add_row({0: 1}, ">=", 2)
    solution = solve_lp(lp, mode)
    assert solution.status == "infeasible"
    assert solution.x is None
    with pytest.raises(LpStatusError):
        duality_gap(solution)


def test_unbounded_program():
    lp = LinearProgram.with_variables([-1])
    lp.add_row({0: 1}, ">=", 1)
    solution = solve_lp(lp, "exact")
    assert solution.status == "unbounded"
    assert solution.objective is None


def test_finite_upper_bounds_are_respected():
    lp = LinearProgram.with_variables([-1, -2], [(0, 4), (Fraction(1, 2), 3)])
    lp.add_row({0: 1, 1: 1}, "<=", 5)
    solution = solve_lp(lp, "exact")
    assert solution.objective == -8
    assert solution.x == [2, 3]
    assert duality_gap(solution) == 0


def test_unknown_mode():
    with pytest.raises(ParameterError):
        solve_lp(at_least_three(), "interior")


# ==================== Random programs ====================

@pytest.mark.parametrize("seed", SEEDS)
def test_simplex_matches_vertex_enumeration(seed):
    lp = random_program(seed)
    solution = solve_lp(lp, "exact")
    oracle = brute_force_optimum(lp)
    if oracle.value is None:
        assert solution.status == "infeasible"
        return
    assert solution.is_optimal
    assert solution.objective == oracle.value
    assert duality_gap(solution) == 0
    assert solution.slackness == 0


@pytest.mark.parametrize("seed", SEEDS)
def test_float_agrees_with_exact(seed):
    lp = random_program(seed)
    exact = solve_lp(lp, "exact")
    approx = solve_lp(lp, "float")
    assert approx.status == exact.status
    if not exact.is_optimal:
        return
    assert gap_within_tolerance(approx)
    assert math.isclose(float(exact.objective), approx.objective, rel_tol=1e-8, abs_tol=1e-8)
    assert approx.pivot_rule == "steepest-edge"


def test_oracle_refuses_large_programs():
    lp = LinearProgram.with_variables([1] * 30)
    for i in range(10):
        lp.add_row({i: 1, i + 10: 1}, "<=", 1)
    with pytest.raises(ParameterError):
        brute_force_optimum(lp, max_bases=100)


# ==================== Input checks and text format ====================

def test_bad_programs_are_rejected():
    lp = LinearProgram.with_variables([1, 1])
    with pytest.raises(LpInputError):
        lp.add_row({0: 1}, "<", 1)
    with pytest.raises(LpInputError):
        lp.add_row({2: 1}, "<=", 1)
    with pytest.raises(LpInputError):
        LinearProgram.with_variables([1, float("nan")])
    with pytest.raises(LpInputError):
        LinearProgram.with_variables([1], [(2, 1)])
    with pytest.raises(LpInputError):
        LinearProgram(c=[1], rows=[{0: 1}], senses=[], b=[1])


def test_lp_format():
    text = at_least_three().to_lp_format()
    assert text.splitlines() == [
        "\\ at-least-three",
        "Minimize",
        " obj: 1 x0",
        "Subject To",
        " c0: 1 x0 >= 3",
        "Bounds",
        " 0 <= x0 <= +inf",
        "End",
    ]
    assert " x2 free" in absolute_value_of_five().to_lp_format()


def test_debug_dump(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "LP_DEBUG_DUMP_DIR", str(tmp_path))
    solve_lp(at_least_three(), "exact")
    dumps = list(tmp_path.glob("at-least-three-*.lp"))
    assert len(dumps) == 1
    assert "Minimize" in dumps[0].read_text()
