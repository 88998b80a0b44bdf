"""Tests of the closing engine and the density experiment."""

import numpy as np
import pytest

from impulsive import (ClosingFailure, NotFound, ORBIT_TAG, build_graph, c1_distance, close_orbit, close_to_periodic,
                       density_experiment, find_pseudo_orbit, poincare, support_clusters)


EPS = 0.1


@pytest.fixture(scope="module")
def annulus_graph(annulus):
    return build_graph(annulus, 0.01, 0.01)


def test_find_pseudo_orbit(annulus_graph):
    points = find_pseudo_orbit(annulus_graph, 30, 0)
    grid = annulus_graph.grid
    assert grid.cell_of(points[0]) == 30
    assert grid.cell_of(points[-1]) == 0
    for a, b in zip(points, points[1:]):
        assert annulus_graph.graph.has_edge(grid.cell_of(a), grid.cell_of(b))
    with pytest.raises(NotFound):
        find_pseudo_orbit(annulus_graph, 0, 30)


def test_close_orbit_by_recurrence(annulus):
    x = np.array([1.3])
    landing, _ = poincare(annulus, x)
    y = landing + 0.002
    result = close_orbit(annulus, x, y, 0.5, 0.01)
    assert result.returns == 1
    assert result.plan.feasible
    assert len(result.impulse.bumps) == 1
    assert c1_distance(annulus.impulse, result.impulse) <= 0.5
    closed, _ = poincare(annulus.with_impulse(result.impulse), x)
    assert closed[0] == pytest.approx(y[0], abs=1e-8)
    assert result.to_record()['returns'] == 1


def test_close_orbit_on_orbit_without_budget(annulus):
    x = np.array([1.3])
    y, _ = poincare(annulus, x)
    result = close_orbit(annulus, x, y, 0.0, 0.01)
    assert result.impulse is annulus.impulse
    assert not result.impulse.bumps


def test_close_orbit_without_budget(annulus):
    with pytest.raises(ClosingFailure) as info:
        close_orbit(annulus, [1.3], [1.152], 0.0, 0.01, max_halvings=0, h=0.05)
    assert info.value.reason == "budget"


def test_close_to_existing_orbit(annulus):
    J, orbit = close_to_periodic(annulus, [1.005], EPS)
    assert J is annulus.impulse
    assert orbit.tag == ORBIT_TAG.HYPERBOLIC


def test_close_to_periodic(radial):
    q = np.array([1.0])
    J, orbit = close_to_periodic(radial, q, EPS, h=0.1, delta=0.1)
    assert orbit.tag == ORBIT_TAG.HYPERBOLIC
    assert np.min(np.abs(radial.Dhat.chart_delta(orbit.points, q))) <= 0.2
    assert c1_distance(radial.impulse, J) <= EPS
    # The orbit is reproduced by direct simulation.
    v, _ = poincare(radial.with_impulse(J), orbit.points[0])
    assert v == pytest.approx(orbit.points[0], abs=1e-8)


def test_density_experiment(radial):
    report = density_experiment(radial, EPS, 0.1, 0.1)
    assert len(report.rows) == 63
    assert report.fraction >= 0.95
    record = report.to_record()
    assert record['cell_count'] == 63
    assert sum(report.taxonomy.values()) == 63
    for row in report.rows:
        if row['status'] == "success":
            assert row['c1_cost'] <= EPS


def test_density_experiment_sample(radial):
    report = density_experiment(radial, EPS, 0.1, 0.1, max_cells=5, seed=3)
    assert len(report.rows) == 5
    again = density_experiment(radial, EPS, 0.1, 0.1, max_cells=5, seed=3)
    assert [r['cell_id'] for r in report.rows] == [r['cell_id'] for r in again.rows]


def test_close_orbit_spreads_gap_along_rotation(torus):
    """A far target on the irrational torus is reached by many small jumps."""
    result = close_orbit(torus, [0.5], [2.0], EPS, 1e-3, max_halvings=0)
    J = result.impulse
    assert result.returns > 1
    assert len(J.bumps) == result.returns
    assert all(len(c) == 1 for c in support_clusters(J.bumps))
    assert c1_distance(torus.impulse, J) <= EPS
    v = np.array([0.5])
    for _ in range(result.returns):
        v, _ = poincare(torus.with_impulse(J), v)
    assert torus.Dhat.chart_delta(v, [2.0])[0] == pytest.approx(0.0, abs=1e-8)


def test_close_to_periodic_on_torus(torus):
    J, orbit = close_to_periodic(torus, [0.5], EPS, h=0.01, delta=0.01)
    assert orbit.tag == ORBIT_TAG.HYPERBOLIC
    assert orbit.N > 1
    assert c1_distance(torus.impulse, J) <= EPS
