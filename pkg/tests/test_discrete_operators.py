from fractions import Fraction

import numpy as np
import pytest
import sympy

from app.core.errors import GridError, GridTooSmallError, OperatorShapeError, ParameterError
from app.discrete.forms import random_form, sample_form, zero_form
from app.discrete.grid import Grid
from app.discrete.operators import discretize_dc
from app.lie.group import coordinate_symbols
from app.rumin.complex import apply_symbolic_dc

REFINEMENT_BOX = ((-1, 1), (-1, 1), ("-1/4", "1/4"))


# ==================== Grid ====================

def test_grid_geometry(small_grid):
    assert small_grid.shape == (5, 5, 5)
    assert small_grid.size == 125
    assert small_grid.cell_volume == 1
    assert small_grid.point(0) == (-2, -2, -2)
    assert small_grid.coordinates.shape == (125, 3)


def test_anisotropic_spacing(heisenberg):
    grid = Grid.centered(heisenberg, "1/2", 4)
    assert grid.spacing == (Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    assert grid.box[2] == (-1, 1)
    assert grid.shape == (9, 9, 9)
    assert grid.cell_volume == Fraction(1, 16)
    assert grid.refine().h == Fraction(1, 4)


def test_margins(small_grid):
    centre = small_grid.flat_index((2, 2, 2))
    assert small_grid.margin(centre) == 2
    assert small_grid.margin(0) == 0
    assert list(small_grid.interior(2)) == [centre]
    assert len(small_grid.interior(1)) == 27


def test_snap(small_grid):
    assert small_grid.snap((0, 0, 0)) == small_grid.flat_index((2, 2, 2))
    # halves round up
    assert small_grid.snap((Fraction(1, 2), 0, 0)) == small_grid.flat_index((3, 2, 2))
    assert small_grid.snap((3, 0, 0)) is None
    coords = np.array([[0.0, 0.0, 0.0], [0.4, -1.2, 1.9], [2.6, 0.0, 0.0]])
    assert list(small_grid.snap_array(coords)) == [
        small_grid.flat_index((2, 2, 2)),
        small_grid.flat_index((2, 1, 4)),
        -1,
    ]


def test_points_in_box(small_grid):
    points = small_grid.points_in_box([(0, 1), ("-1/2", "1/2"), (0, 0)])
    assert [small_grid.point(p) for p in points] == [(0, 0, 0), (1, 0, 0)]


def test_grid_errors(heisenberg):
    with pytest.raises(GridError):
        Grid(heisenberg, ((0, 1),) * 3, 0)
    with pytest.raises(GridError):
        Grid(heisenberg, ((0, 1),) * 2, 1)
    with pytest.raises(GridError):
        Grid(heisenberg, ((0, 1), (1, 0), (0, 1)), 1)
    with pytest.raises(GridError):
        Grid(heisenberg, ((0, 1),) * 3, 1).flat_index((2, 0, 0))


# ==================== Forms ====================

def test_sample_form_exact_and_float(heisenberg_complex, small_grid, heisenberg):
    x, y, z = coordinate_symbols(heisenberg)
    exact = sample_form(heisenberg_complex, small_grid, 1, [x * y / 2, z], "exact")
    approx = sample_form(heisenberg_complex, small_grid, 1, [x * y / 2, z], "float")
    p = small_grid.flat_index((4, 3, 0))
    assert exact.values[p, 0] == Fraction(1)
    assert exact.values[p, 1] == -2
    assert np.allclose(approx.values, exact.values.astype(float))
    with pytest.raises(OperatorShapeError):
        sample_form(heisenberg_complex, small_grid, 1, [x], "exact")


def test_form_arithmetic(heisenberg_complex, small_grid, rng):
    w = random_form(heisenberg_complex, small_grid, 1, rng, "exact")
    assert (w - w).sup_norm() == 0
    assert (2 * w).sup_norm() == 2 * w.sup_norm()
    assert zero_form(heisenberg_complex, small_grid, 2).sup_norm() == 0.0


# ==================== Discretized d_c ====================

def test_operator_shape_and_margin(heisenberg_complex, small_grid):
    d0 = discretize_dc(heisenberg_complex, small_grid, 0, "exact")
    d1 = discretize_dc(heisenberg_complex, small_grid, 1, "exact")
    assert d0.shape == (250, 125)
    assert d0.margin == 1
    assert d1.margin == 2
    assert {d1.row_point(r) for r in d1.rows} == {small_grid.flat_index((2, 2, 2))}


def test_gradient_is_exact_on_quadratics(heisenberg_complex, medium_grid, heisenberg):
    x, y, z = coordinate_symbols(heisenberg)
    f = x * y + z ** 2 - 3 * x
    op = discretize_dc(heisenberg_complex, medium_grid, 0, "exact")
    discrete = op(sample_form(heisenberg_complex, medium_grid, 0, [f], "exact"))
    expected = sample_form(heisenberg_complex, medium_grid, 1, apply_symbolic_dc(heisenberg_complex, 0, [f]), "exact")
    valid = discrete.valid_points()
    assert len(valid) == 125
    assert (discrete.values[valid] == expected.values[valid]).all()


def test_second_order_block_is_exact_on_quadratics(heisenberg_complex, medium_grid, heisenberg):
    x, y, z = coordinate_symbols(heisenberg)
    coefficients = [x * y + z, y ** 2 - x * z]
    op = discretize_dc(heisenberg_complex, medium_grid, 1, "exact")
    discrete = op(sample_form(heisenberg_complex, medium_grid, 1, coefficients, "exact"))
    expected = sample_form(
        heisenberg_complex, medium_grid, 2, apply_symbolic_dc(heisenberg_complex, 1, coefficients), "exact"
    )
    valid = discrete.valid_points()
    assert len(valid) == 27
    assert (discrete.values[valid] == expected.values[valid]).all()


def test_float_and_exact_operators_agree(heisenberg_complex, small_grid, rng):
    w = random_form(heisenberg_complex, small_grid, 1, rng, "exact")
    exact = discretize_dc(heisenberg_complex, small_grid, 1, "exact")(w)
    approx = discretize_dc(heisenberg_complex, small_grid, 1, "float")(w.as_float())
    assert np.allclose(approx.values, exact.values.astype(float))


def test_operator_errors(heisenberg_complex, small_grid, heisenberg):
    with pytest.raises(ParameterError):
        discretize_dc(heisenberg_complex, small_grid, 3, "exact")
    with pytest.raises(GridTooSmallError):
        discretize_dc(heisenberg_complex, Grid(heisenberg, ((0, 1),) * 3, 1), 0, "exact")
    with pytest.raises(ParameterError):
        discretize_dc(heisenberg_complex, small_grid, 0, "interval")
    op = discretize_dc(heisenberg_complex, small_grid, 0, "float")
    with pytest.raises(OperatorShapeError):
        op(zero_form(heisenberg_complex, small_grid, 1))


@pytest.mark.slow
def test_discrete_complex_defect_shrinks_under_refinement(heisenberg_complex, heisenberg):
    x, y, z = coordinate_symbols(heisenberg)
    f = sympy.exp(x / 2 + y / 3 - z / 5) + sympy.sin(x * y)
    defects = []
    for h in ("1/4", "1/8", "1/16"):
        grid = Grid(heisenberg, REFINEMENT_BOX, h)
        d0 = discretize_dc(heisenberg_complex, grid, 0, "float")
        d1 = discretize_dc(heisenberg_complex, grid, 1, "float")
        defects.append(d1(d0(sample_form(heisenberg_complex, grid, 0, [f], "float"))).sup_norm())
    assert defects[1] <= defects[0] / 1.7 + 1e-12
    assert defects[2] <= defects[1] / 1.7 + 1e-12


def test_equal_grids_share_assembled_rows(heisenberg_complex, heisenberg):
    first = Grid(heisenberg, ((-2, 2),) * 3, 1)
    second = Grid(heisenberg, ((-2, 2),) * 3, "1")
    a = discretize_dc(heisenberg_complex, first, 0, "exact")
    b = discretize_dc(heisenberg_complex, second, 0, "exact")
    assert a.grid is first
    assert b.grid is second
    assert a.rows is b.rows
    omega = sample_form(heisenberg_complex, second, 0, [sympy.Integer(1)], "exact")
    assert b(omega).sup_norm() == 0
