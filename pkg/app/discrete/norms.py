"""
Function-space norms on sampled forms
"""
import numpy as np

from app.core.errors import MarginError, ParameterError
from app.discrete.forms import DiscreteForm
from app.discrete.grid import Grid
from app.discrete.operators import discretize_dc
from app.lie.group import vectorized_group_law
from app.rumin.complex import RuminComplex


def _lp_norm(form: DiscreteForm, p: float, volume: float) -> float:
    points = form.valid_points()
    if len(points) == 0:
        raise MarginError(f"no grid point is {form.margin} cells inside the box")
    if form.components == 0:
        return 0.0
    fiber = np.abs(form.values[points].astype(float)).max(axis=1)
    return float((volume * np.sum(fiber ** p)) ** (1.0 / p))


def sobolev_norm(rc: RuminComplex, grid: Grid, f: DiscreteForm, p: float) -> float:
    """
    |f|_Lp + |D_c f|_Lp with cell-volume weights and the coordinate sup fiber norm

    D_c f is measured only where its stencil fits (margin of f plus the
    derivative order of d_c).

    Raises:
        ParameterError: p outside [1, inf)
        MarginError: no point carries a valid D_c f
    """
    if not 1 <= p < np.inf:
        raise ParameterError(f"p must lie in [1, inf), got {p}")
    volume = float(grid.cell_volume)
    total = _lp_norm(f, p, volume)
    if f.degree < rc.n:
        total += _lp_norm(discretize_dc(rc, grid, f.degree, "float")(f.as_float()), p, volume)
    return total


def holder_seminorm(grid: Grid, f: DiscreteForm, alpha: float) -> float:
    """
    max over pairs x != y of |f(y) - f(x)| / ||x^-1 y||^alpha

    The homogeneous norm is max_i |z_i|^(1 / layer(i)).

    Raises:
        ParameterError: alpha outside (0, 1)
    """
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    points = f.valid_points()
    if len(points) < 2:
        return 0.0
    coords = grid.coordinates[points]
    values = f.values[points].astype(float)
    law = vectorized_group_law(grid.algebra)
    exponents = 1.0 / np.array(grid.algebra.layers, dtype=float)
    best = 0.0
    for i in range(len(points) - 1):
        others = coords[i + 1:]
        x_inverse = np.broadcast_to(-coords[i], others.shape)
        product = law(list(x_inverse.T), list(others.T))
        diff = np.stack([np.broadcast_to(np.asarray(c, dtype=float), (len(others),)) for c in product], axis=1)
        distance = (np.abs(diff) ** exponents).max(axis=1)
        jump = np.abs(values[i + 1:] - values[i]).max(axis=1) if f.components else np.zeros(len(others))
        quotient = jump / distance ** alpha
        best = max(best, float(quotient.max()))
    return best
