"""Tests of hitting times, trajectories, Poincaré maps and holonomies."""

import math

import numpy as np
import pytest

from scipy.integrate import quad

from impulsive import (AnalysisError, ConfigError, MultipleCrossings, NoCrossing, create_field, create_section,
                       discontinuity_report, first_hit, holonomy, make_example, min_flight_time, poincare,
                       poincare_full, poincare_jacobian, tau1_derivative_sup, trajectory)


EPS = 1e-8
FD_STEP = 1e-6
FD_TOL = 1e-4


def _fd_jacobian(fun, u, h=FD_STEP):
    u = np.asarray(u, dtype=float)
    cols = []
    for j in range(len(u)):
        e = np.zeros(len(u))
        e[j] = h
        cols.append((np.asarray(fun(u + e)) - np.asarray(fun(u - e))) / (2 * h))
    return np.stack(cols, axis=-1)


def test_predator_prey_first_hit(predator_prey):
    oracle, _ = quad(lambda x: 1 / (x * (3 - x)), 0.5, 1)
    hit = first_hit(predator_prey, [0.5, 0.0])
    assert oracle == pytest.approx(math.log(2.5) / 3)
    assert hit.tau1 == pytest.approx(oracle, abs=1e-6)
    assert np.allclose(hit.point, [1.0, 0.0], atol=1e-9)
    assert hit.hit_chart[0] == pytest.approx(0.0, abs=1e-9)


def test_no_hit_within_horizon(annulus):
    hit = first_hit(annulus, [-1.25, 0.0], t_max=1.0)
    assert not hit.finite
    assert hit.tau1 == math.inf


def test_annulus_trajectory(annulus):
    traj = trajectory(annulus, [-1.25, 0.0], 10.0)
    assert [j.time for j in traj.jumps] == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi], abs=EPS)
    assert [j.pre[0] for j in traj.jumps] == pytest.approx([1.25, 1.125, 1.0625], abs=EPS)
    assert [j.post[0] for j in traj.jumps] == pytest.approx([1.125, 1.0625, 1.03125], abs=EPS)
    rows = traj.rows(annulus.field)
    assert sum(row[-1] for row in rows) == 3
    assert rows[-1][0] == pytest.approx(10.0)
    assert len(traj.jump_rows()) == 3


def test_trajectory_negative_horizon(annulus):
    with pytest.raises(ConfigError):
        trajectory(annulus, [-1.25, 0.0], -1.0)


def test_trajectory_error_carries_jump_index(annulus):
    # The start point lies outside the annulus.
    with pytest.raises(AnalysisError) as info:
        trajectory(annulus, [-2.5, 0.0], 1.0)
    assert info.value.jump_index == 0


def test_annulus_return_map(annulus):
    v, tau = poincare(annulus, [1.25])
    assert v[0] == pytest.approx(1.125, abs=EPS)
    assert tau == pytest.approx(math.pi, abs=EPS)


def test_poincare_jacobian_annulus(annulus):
    rng = np.random.default_rng(5)
    for v in rng.uniform(1.01, 1.49, size=(100, 1)):
        jac = poincare_jacobian(annulus, v)
        fd = _fd_jacobian(lambda u: poincare(annulus, u)[0], v)
        assert np.max(np.abs(jac - fd)) <= FD_TOL
        assert jac[0, 0] == pytest.approx(0.5, abs=1e-6)


def test_poincare_jacobian_billiard(billiard):
    rng = np.random.default_rng(6)
    checked = 0
    for v in rng.uniform([-0.39, -1.19], [0.39, 1.19], size=(120, 2)):
        try:
            jac = poincare_jacobian(billiard, v)
            fd = _fd_jacobian(lambda u: poincare(billiard, u)[0], v)
        except AnalysisError:
            continue
        assert np.max(np.abs(jac - fd)) <= FD_TOL
        checked += 1
    assert checked >= 100


def test_poincare_jacobian_predator_prey(predator_prey):
    rng = np.random.default_rng(8)
    for v in rng.uniform(0.1, 1.5, size=(10, 1)):
        jac = poincare_jacobian(predator_prey, v)
        fd = _fd_jacobian(lambda u: poincare(predator_prey, u)[0], v)
        assert np.max(np.abs(jac - fd)) <= FD_TOL


def test_tau1_gradient(annulus, billiard):
    rng = np.random.default_rng(9)
    for u in rng.uniform(1.05, 1.45, size=25):
        x = np.array([-u, 0.05])
        hit = first_hit(annulus, x)
        fd = _fd_jacobian(lambda y: first_hit(annulus, y, with_jacobian=False).tau1, x)
        assert np.max(np.abs(hit.dtau1 - fd)) <= FD_TOL
    for v in rng.uniform([-0.39, -1.19], [0.39, 1.19], size=(100, 2)):
        x = billiard.Dhat.chart(v) + np.array([0.0, 0.0, 0.1])
        hit = first_hit(billiard, x, strict=False)
        fd = _fd_jacobian(lambda y: first_hit(billiard, y, strict=False, with_jacobian=False).tau1, x)
        assert np.max(np.abs(hit.dtau1 - fd)) <= FD_TOL


def test_poincare_full_reports_hit(annulus):
    ret = poincare_full(annulus, [1.4])
    assert ret.hit.finite
    assert ret.hit.hit_chart[0] == pytest.approx(1.4, abs=EPS)
    assert ret.hit.transversality == pytest.approx(1.0)


def test_tau1_derivative_dichotomy(annulus):
    assert tau1_derivative_sup(annulus) == pytest.approx(0.0, abs=EPS)
    interchanged = make_example("lorenz_skew", {'interchanged': True}).system()
    assert tau1_derivative_sup(interchanged) == math.inf
    assert not interchanged.validation.verdict


def test_min_flight_time(annulus):
    assert min_flight_time(annulus) == pytest.approx(1.0)


def test_discontinuity_report(annulus):
    report = discontinuity_report(annulus, grid_res=8)
    assert report['counts']['return'] == 8
    assert len(report['cells']) == 8


def test_holonomy():
    field = create_field("annulus_rotation")
    S1 = create_section("S1", {'type': "segment", 'origin': [0, 0], 'direction': [1, 0], 'lo': [1], 'hi': [2]})
    S2 = create_section("S2", {'type': "segment", 'origin': [0, 0], 'direction': [math.cos(0.1), math.sin(0.1)], 'lo': [1], 'hi': [2]})
    v, theta = holonomy(field, S1, S2, [1.5], 0.5)
    assert v[0] == pytest.approx(1.5, abs=1e-9)
    assert theta == pytest.approx(0.1, abs=1e-9)
    with pytest.raises(MultipleCrossings):
        holonomy(field, S1, S2, [1.5], 7.0)
    with pytest.raises(NoCrossing):
        holonomy(field, S1, S2, [1.5], 0.05)
    with pytest.raises(ConfigError):
        holonomy(create_field("disk_billiard"), S1, S2, [1.5], 0.5)
