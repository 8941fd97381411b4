from fractions import Fraction

import numpy as np
import pytest
import sympy

from app.cli.deps import load_current
from app.core.errors import CurrentError, MarginError, OperatorShapeError
from app.discrete.currents import (
    DiscreteCurrent,
    boundary,
    coarsen_current,
    current_from_entries,
    diffuse_boundary_sign,
    diffuse_current,
    mass,
    normal_mass,
    pairing_density,
)
from app.discrete.flat import flat_norm_dual, flat_norm_primal, form_flat_norm
from app.discrete.forms import DiscreteForm, random_form, sample_form
from app.discrete.grid import Grid
from app.discrete.operators import discretize_dc
from app.lie.group import coordinate_symbols


@pytest.fixture(scope="module")
def sample(data_dir):
    return load_current(data_dir / "heisenberg_sample_current.json", "exact")


def centre(grid):
    return grid.flat_index((2, 2, 2))


# ==================== Mass and boundary ====================

def test_sample_current_mass(sample):
    _, grid, T = sample
    assert T.dimension == 1
    assert mass(T) == Fraction(23, 6)
    assert len(T.support()) == 4


def test_current_arithmetic(small_grid):
    T = DiscreteCurrent.dirac(small_grid, 1, 3, 0, Fraction(1, 2))
    assert (T - T).is_zero
    assert mass(3 * T) == Fraction(3, 2)
    assert mass(T.as_float()) == 0.5
    with pytest.raises(CurrentError):
        T + DiscreteCurrent.zero(small_grid, 2)
    with pytest.raises(CurrentError):
        DiscreteCurrent.dirac(small_grid, 1, 500, 0)


def test_mass_is_the_dual_of_the_sup_norm(heisenberg_complex, small_grid, rng):
    T = DiscreteCurrent(small_grid, 1, {(3, 0): 2, (40, 1): -3, (62, 0): Fraction(1, 2)})
    assert mass(T) == Fraction(11, 2)
    for _ in range(200):
        w = DiscreteForm(small_grid, 1, rng.uniform(-1, 1, size=(small_grid.size, 2)))
        assert T.pair(w) <= mass(T)
    signs = np.zeros((small_grid.size, 2))
    for (p, a), v in T.coefficients.items():
        signs[p, a] = 1 if v > 0 else -1
    assert T.pair(DiscreteForm(small_grid, 1, signs)) == mass(T)


def test_current_from_entries_sums_repeats(small_grid):
    T = current_from_entries(small_grid, 1, [((2, 2, 2), 0, 1), ((2, 2, 2), 0, Fraction(1, 2)), ((1, 1, 1), 1, -1)])
    assert T.coefficients == {(centre(small_grid), 0): Fraction(3, 2), (small_grid.flat_index((1, 1, 1)), 1): -1}


@pytest.mark.parametrize("m", [1, 2])
def test_boundary_is_adjoint_to_dc(heisenberg_complex, small_grid, rng, m):
    op = discretize_dc(heisenberg_complex, small_grid, m - 1, "exact")
    points = small_grid.interior(op.margin)
    coefficients = {
        (int(p), a): Fraction(int(rng.integers(-5, 6)), 3)
        for p in points
        for a in range(heisenberg_complex.dim(m))
    }
    T = DiscreteCurrent(small_grid, m, coefficients)
    w = random_form(heisenberg_complex, small_grid, m - 1, rng, "exact")
    assert boundary(heisenberg_complex, small_grid, T, "exact").pair(w) == T.pair(op(w))


def test_boundary_annihilates_exact_forms(heisenberg_complex, medium_grid, heisenberg):
    x, y, z = coordinate_symbols(heisenberg)
    R = DiscreteCurrent.dirac(medium_grid, 2, medium_grid.flat_index((3, 3, 3)), 1)
    bR = boundary(heisenberg_complex, medium_grid, R, "exact")
    assert bR.dimension == 1
    assert not bR.is_zero
    # D_c is exact on quadratics one cell inside the box, so D_c D_c f vanishes at the centre
    f = sample_form(heisenberg_complex, medium_grid, 0, [x * y - z ** 2 + 2 * y], "exact")
    assert bR.pair(discretize_dc(heisenberg_complex, medium_grid, 0, "exact")(f)) == 0


def test_margin_error_lists_offending_points(heisenberg_complex, small_grid):
    T = DiscreteCurrent(small_grid, 1, {(0, 0): 1, (centre(small_grid), 0): 1})
    with pytest.raises(MarginError) as info:
        boundary(heisenberg_complex, small_grid, T, "exact")
    assert info.value.offending == [(0, 0, 0)]


def test_boundary_errors(heisenberg_complex, small_grid, medium_grid):
    with pytest.raises(CurrentError):
        boundary(heisenberg_complex, small_grid, DiscreteCurrent.dirac(small_grid, 0, 0, 0))
    with pytest.raises(CurrentError):
        boundary(heisenberg_complex, medium_grid, DiscreteCurrent.dirac(small_grid, 1, 62, 0))
    with pytest.raises(CurrentError):
        boundary(heisenberg_complex, small_grid, DiscreteCurrent.dirac(small_grid, 1, 62, 2))


def test_normal_mass(heisenberg_complex, sample):
    _, grid, T = sample
    N = normal_mass(heisenberg_complex, grid, T, "exact")
    assert N == mass(T) + mass(boundary(heisenberg_complex, grid, T, "exact"))
    assert N >= mass(T)
    zero = DiscreteCurrent.dirac(grid, 0, 0, 0, 5)
    assert normal_mass(heisenberg_complex, grid, zero) == 5


# ==================== Flat norm ====================

def test_flat_norm_primal_equals_dual(heisenberg_complex, sample):
    _, grid, T = sample
    primal = flat_norm_primal(heisenberg_complex, grid, T, "exact")
    dual = flat_norm_dual(heisenberg_complex, grid, T, "exact")
    assert primal.value == dual.value
    assert 0 < primal.value <= mass(T) <= normal_mass(heisenberg_complex, grid, T, "exact")


def test_flat_witnesses(heisenberg_complex, sample):
    _, grid, T = sample
    primal = flat_norm_primal(heisenberg_complex, grid, T, "exact")
    decomposition = primal.S + boundary(heisenberg_complex, grid, primal.R, "exact")
    assert decomposition.coefficients == T.coefficients
    assert mass(primal.S) + mass(primal.R) == primal.value

    dual = flat_norm_dual(heisenberg_complex, grid, T, "exact")
    assert T.pair(dual.omega) == dual.value
    assert form_flat_norm(heisenberg_complex, grid, dual.omega) <= 1


def test_flat_norm_float_agrees(heisenberg_complex, sample):
    _, grid, T = sample
    exact = flat_norm_primal(heisenberg_complex, grid, T, "exact").value
    approx = flat_norm_primal(heisenberg_complex, grid, T.as_float(), "float").value
    assert approx == pytest.approx(float(exact), rel=1e-8)


def test_flat_norm_is_homogeneous(heisenberg_complex, sample):
    _, grid, T = sample
    once = flat_norm_primal(heisenberg_complex, grid, T, "exact").value
    assert flat_norm_primal(heisenberg_complex, grid, T * Fraction(-3, 2), "exact").value == Fraction(3, 2) * once


def test_flat_norm_of_a_boundary_is_at_most_the_filling_mass(heisenberg_complex, small_grid):
    R = DiscreteCurrent(small_grid, 2, {(centre(small_grid), 0): 1, (centre(small_grid), 1): Fraction(-1, 2)})
    T = boundary(heisenberg_complex, small_grid, R, "exact")
    assert flat_norm_primal(heisenberg_complex, small_grid, T, "exact").value <= mass(R)


def test_flat_norm_of_zero(heisenberg_complex, small_grid):
    assert flat_norm_primal(heisenberg_complex, small_grid, DiscreteCurrent.zero(small_grid, 1), "exact").value == 0


def test_flat_norm_needs_higher_currents(heisenberg_complex, small_grid):
    with pytest.raises(CurrentError):
        flat_norm_primal(heisenberg_complex, small_grid, DiscreteCurrent.dirac(small_grid, 3, 62, 0))


def test_flat_norm_near_faces_needs_no_margin(heisenberg_complex, small_grid):
    T = DiscreteCurrent.dirac(small_grid, 1, 0, 0)
    assert flat_norm_primal(heisenberg_complex, small_grid, T, "exact").value == 1


# ==================== Diffuse currents ====================

def test_diffuse_mass_is_the_riemann_sum_of_the_density(heisenberg_complex, small_grid, rng):
    phi = random_form(heisenberg_complex, small_grid, 2, rng, "exact")
    P = diffuse_current(heisenberg_complex, small_grid, phi)
    assert P.dimension == 1
    assert mass(P) == small_grid.cell_volume * sum(pairing_density(heisenberg_complex, phi))


def test_diffuse_current_pairs_by_wedge(heisenberg_complex, heisenberg):
    grid = Grid.centered(heisenberg, "1/2", 2)
    phi = sample_form(heisenberg_complex, grid, 3, [1], "exact")
    P = diffuse_current(heisenberg_complex, grid, phi)
    ones = sample_form(heisenberg_complex, grid, 0, [1], "exact")
    assert abs(P.pair(ones)) == grid.size * grid.cell_volume


def test_diffuse_boundary_sign():
    assert diffuse_boundary_sign(3, 1) == -1
    assert diffuse_boundary_sign(3, 2) == 1


def test_pairing_shape_errors(heisenberg_complex, small_grid, rng):
    T = DiscreteCurrent.dirac(small_grid, 1, 62, 0)
    with pytest.raises(OperatorShapeError):
        T.pair(random_form(heisenberg_complex, small_grid, 2, rng))


@pytest.mark.slow
def test_diffuse_boundary_matches_stokes_under_refinement(heisenberg_complex, heisenberg):
    x, y, z = coordinate_symbols(heisenberg)
    r2 = x ** 2 + y ** 2 + 4 * z ** 2
    bump = sympy.Piecewise(((1 - r2) ** 4, r2 < 1), (0, True))
    test_function = 1 + x - y ** 2 / 2 + x * z
    sign = diffuse_boundary_sign(3, 1)
    errors = []
    for h in ("1/4", "1/8"):
        grid = Grid(heisenberg, (("-3/2", "3/2"), ("-3/2", "3/2"), ("-3/4", "3/4")), h)
        phi = sample_form(heisenberg_complex, grid, 2, [bump, x * bump], "float")
        w = sample_form(heisenberg_complex, grid, 0, [test_function], "float")
        P = diffuse_current(heisenberg_complex, grid, phi)
        d_phi = discretize_dc(heisenberg_complex, grid, 2, "float")(phi)
        left = boundary(heisenberg_complex, grid, P, "float").pair(w)
        right = sign * diffuse_current(heisenberg_complex, grid, d_phi).pair(w)
        errors.append(abs(left - right))
    assert errors[1] <= 0.6 * errors[0] + 1e-10


def test_coarsening_does_not_increase_mass(heisenberg, rng):
    fine = Grid(heisenberg, ((-1, 1),) * 3, "1/2")
    coarse = Grid(heisenberg, ((-1, 1),) * 3, 1)
    T = DiscreteCurrent(fine, 1, {
        (int(p), int(rng.integers(0, 2))): Fraction(int(rng.integers(-4, 5)), 4)
        for p in rng.choice(fine.size, size=20, replace=False)
    })
    coarsened = coarsen_current(T, coarse)
    assert coarsened.grid is coarse
    assert mass(coarsened) <= mass(T)
    outside = Grid(heisenberg, ((0, 1),) * 3, 1)
    with pytest.raises(CurrentError):
        coarsen_current(DiscreteCurrent.dirac(fine, 1, 0, 0), outside)


# ==================== Random instances ====================

def random_current(grid, rng, exact=True):
    points = rng.choice(grid.interior(1), size=4, replace=False)
    coefficients = {(int(p), int(rng.integers(0, 2))): Fraction(int(rng.integers(-6, 7)), 4) for p in points}
    T = DiscreteCurrent(grid, 1, coefficients)
    return T if exact else T.as_float()


@pytest.mark.parametrize("seed", range(100))
def test_random_currents_duality_and_sandwich(heisenberg_complex, small_grid, seed):
    T = random_current(small_grid, np.random.Generator(np.random.PCG64(seed)))
    primal = flat_norm_primal(heisenberg_complex, small_grid, T, "exact").value
    assert primal == flat_norm_dual(heisenberg_complex, small_grid, T, "exact").value
    assert primal <= mass(T) <= normal_mass(heisenberg_complex, small_grid, T, "exact")

    approx = T.as_float()
    primal_float = flat_norm_primal(heisenberg_complex, small_grid, approx, "float").value
    dual_float = flat_norm_dual(heisenberg_complex, small_grid, approx, "float").value
    assert primal_float == pytest.approx(dual_float, rel=1e-9, abs=1e-12)
    assert primal_float == pytest.approx(float(primal), rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_flat_norm_triangle_inequality(heisenberg_complex, small_grid, seed):
    rng = np.random.Generator(np.random.PCG64(1000 + seed))
    T, S = random_current(small_grid, rng), random_current(small_grid, rng)

    def flat(current):
        return flat_norm_primal(heisenberg_complex, small_grid, current, "exact").value

    assert flat(T + S) <= flat(T) + flat(S)
