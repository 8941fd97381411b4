import json

import pytest

from app.core.config import settings
from app.core.errors import CurrentError, ParameterError, ProbeBudgetError
from app.discrete.probe import compactness_probe, greedy_net, probe_grid
from app.schemas.current import ProbeParams

BOX = [["-1/2", "1/2"], ["-1/2", "1/2"], ["-1/4", "1/4"]]


def params(**overrides):
    values = dict(box=BOX, h="1/2", nu="1", epsilon="1/5", samples=4, levels=2, seed=7)
    values.update(overrides)
    return ProbeParams(**values)


def test_greedy_net():
    distances = [
        [0, 1, 5],
        [1, 0, 5],
        [5, 5, 0],
    ]
    assert greedy_net(distances, 2) == [0, 2]
    assert greedy_net(distances, 0) == [0, 1, 2]
    assert greedy_net([], 1) == []


def test_probe_grid_pads_the_box(heisenberg_complex):
    grid = probe_grid(heisenberg_complex, params(), 0)
    assert grid.h == pytest.approx(0.5)
    assert grid.points_in_box(BOX)
    (x_lo, x_hi), _, (z_lo, z_hi) = grid.box
    assert x_lo < -0.5 and x_hi > 0.5
    assert z_lo < -0.25 and z_hi > 0.25
    assert probe_grid(heisenberg_complex, params(), 1).h == pytest.approx(0.25)


def test_zero_mass_bound_collapses_the_net(heisenberg_complex):
    report = compactness_probe(heisenberg_complex, params(nu="0"), mode="float")
    assert [level.net_size for level in report.levels] == [1, 1]
    assert all(float(level.max_pairwise_flat) == 0.0 for level in report.levels)


def test_probe_is_deterministic(heisenberg_complex):
    first = compactness_probe(heisenberg_complex, params(), mode="float")
    second = compactness_probe(heisenberg_complex, params(), mode="float")
    assert first.model_dump() == second.model_dump()
    assert first.mode == "float"
    assert [level.level for level in first.levels] == [0, 1]
    assert all(1 <= level.net_size <= 4 for level in first.levels)
    assert all(level.runtime_ms is None for level in first.levels)


def test_flat_distances_respect_the_mass_bound(heisenberg_complex):
    # ||T - S||_F <= N(T) + N(S) <= 2 nu
    report = compactness_probe(heisenberg_complex, params(samples=5, levels=1), mode="float")
    assert float(report.levels[0].max_pairwise_flat) <= 2.0 + 1e-9


def test_probe_with_two_samples(heisenberg_complex):
    report = compactness_probe(heisenberg_complex, params(samples=2, levels=1, epsilon="0"), mode="float")
    assert report.levels[0].net_size in (1, 2)


def test_single_sample_is_its_own_net(heisenberg_complex):
    report = compactness_probe(heisenberg_complex, params(samples=1, levels=1), mode="float")
    assert report.levels[0].net_size == 1
    assert float(report.levels[0].max_pairwise_flat) == 0.0


def test_probe_errors(heisenberg_complex, monkeypatch):
    with pytest.raises(CurrentError):
        compactness_probe(heisenberg_complex, params(dimension=3))
    with pytest.raises(ParameterError):
        compactness_probe(heisenberg_complex, params(box=[["0", "1"]]))
    monkeypatch.setattr(settings, "PROBE_MAX_SAMPLES", 5)
    with pytest.raises(ProbeBudgetError):
        compactness_probe(heisenberg_complex, params())


def test_probe_params_validation():
    with pytest.raises(ValueError):
        params(nu="-1")
    with pytest.raises(ValueError):
        params(samples=0)
    with pytest.raises(ValueError):
        params(dimension=0)


@pytest.mark.slow
def test_reference_run_stays_bounded(heisenberg_complex, data_dir):
    reference = ProbeParams(**json.loads((data_dir / "compactness_reference_params.json").read_text()))
    report = compactness_probe(heisenberg_complex, reference, mode="float")
    coarse, fine = report.levels
    assert fine.net_size <= 2 * coarse.net_size
