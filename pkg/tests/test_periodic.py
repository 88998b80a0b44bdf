"""Tests of periodic orbits, hyperbolicity and continuation."""

import math

import numpy as np
import pytest

from scipy.integrate import quad

from impulsive import (ContinuationFailed, NotFound, ORBIT_TAG, PeriodicOrbit, audit_kupka_smale, c1_distance,
                       classify, continue_orbit, find_periodic, make_hyperbolic, minimal_orbit, same_orbit)
from impulsive.impulse import create_base


EPS = 1e-8


def _orbit(jacobian):
    return PeriodicOrbit(np.array([[0.0]]), np.array([1.0]), np.array([[[jacobian]]]))


def test_annulus_orbit(annulus):
    orbit = find_periodic(annulus, [1.25])
    assert orbit.N == 1
    assert orbit.points[0, 0] == pytest.approx(1.0, abs=EPS)
    assert orbit.period == pytest.approx(math.pi, abs=EPS)
    assert orbit.multipliers[0].real == pytest.approx(0.5, abs=EPS)
    assert orbit.tag == ORBIT_TAG.HYPERBOLIC


def test_predator_prey_segment_orbit(predator_prey):
    oracle, _ = quad(lambda x: 1 / (x * (3 - x)), 0.5, 1)
    orbit = find_periodic(predator_prey, [0.2])
    assert orbit.points[0, 0] == pytest.approx(0.0, abs=1e-9)
    assert orbit.period == pytest.approx(oracle, abs=1e-6)
    multiplier = abs(orbit.multipliers[0])
    assert multiplier < 0.5


def test_billiard_orbit(billiard):
    theta = math.pi / 4
    orbit = find_periodic(billiard, [0.1, theta], N=2)
    assert np.allclose(orbit.monodromy, np.eye(2), atol=1e-9)
    assert orbit.tag == ORBIT_TAG.NON_HYPERBOLIC


def test_make_hyperbolic(billiard):
    orbit = find_periodic(billiard, [0.1, math.pi / 4], N=2)
    J, new = make_hyperbolic(billiard, orbit, 0.1)
    assert new.tag == ORBIT_TAG.HYPERBOLIC
    assert np.allclose(new.points[0], orbit.points[0], atol=1e-9)
    assert c1_distance(billiard.impulse, J) <= 0.1
    assert all(abs(m) > 1 for m in new.multipliers)


def test_make_hyperbolic_keeps_hyperbolic_orbits(annulus):
    orbit = find_periodic(annulus, [1.25])
    J, same = make_hyperbolic(annulus, orbit, 0.1)
    assert J is annulus.impulse
    assert same is orbit


def test_classify():
    assert classify(_orbit(2.0)) == ORBIT_TAG.HYPERBOLIC
    assert classify(_orbit(1.0)) == ORBIT_TAG.NON_HYPERBOLIC
    assert classify(_orbit(-1.0 + 1e-8)) == ORBIT_TAG.NON_HYPERBOLIC
    assert classify(_orbit(math.nan)) == ORBIT_TAG.UNDETERMINED


def test_continuation(annulus):
    orbit = find_periodic(annulus, [1.25])
    base = create_base("affine", {'matrix': [[0.51]], 'source_point': [1], 'target_point': [1]}, 1)
    J = annulus.impulse.with_base(base)
    new = continue_orbit(annulus, orbit, J)
    assert new.period == pytest.approx(math.pi, abs=1e-6)
    assert new.multipliers[0].real == pytest.approx(0.51, abs=1e-6)
    # Unique in its neighbourhood.
    other = find_periodic(annulus.with_impulse(J), [1.1])
    assert other.points[0, 0] == pytest.approx(new.points[0, 0], abs=1e-8)
    with pytest.raises(ContinuationFailed):
        continue_orbit(annulus, orbit, J, eps_T=0.0)


def test_irrational_torus_has_no_orbit(torus):
    with pytest.raises(NotFound):
        find_periodic(torus, [1.0])


def test_orbit_record(annulus):
    record = find_periodic(annulus, [1.25]).to_record()
    assert record['tag'] == "hyperbolic"
    assert record['period'] == pytest.approx(math.pi, abs=EPS)
    assert record['multipliers'][0] == pytest.approx([0.5, 0.0], abs=EPS)


def test_audit(annulus):
    report = audit_kupka_smale(annulus, 4)
    assert len(report.orbits) == 1
    assert report.verdict
    record = report.to_record()
    assert record['orbit_count'] == 1
    assert record['tags']['hyperbolic'] == 1


def test_minimal_orbit_across_the_seam(torus):
    points = np.array([[2 * math.pi - 1e-11], [1e-11]])
    orbit = PeriodicOrbit(points, np.array([1.0, 1.0]), np.ones((2, 1, 1)))
    assert minimal_orbit(orbit).N == 2
    reduced = minimal_orbit(orbit, section=torus.Dhat)
    assert reduced.N == 1
    assert reduced.flight_times == pytest.approx([1.0])


def test_same_orbit_under_rotation(annulus):
    points = np.array([[1.1], [1.2], [1.3]])
    a = PeriodicOrbit(points, np.ones(3), np.ones((3, 1, 1)))
    b = PeriodicOrbit(np.roll(points, 1, axis=0), np.ones(3), np.ones((3, 1, 1)))
    assert same_orbit(a, b, EPS, annulus.Dhat)
    assert not same_orbit(a, PeriodicOrbit(points[:2], np.ones(2), np.ones((2, 1, 1))), EPS)


def test_continuation_of_non_isolated_orbit(billiard):
    # Every orbit of the same angle is periodic.
    orbit = find_periodic(billiard, [0.1, math.pi / 4], N=2)
    with pytest.raises(ContinuationFailed):
        continue_orbit(billiard, orbit, billiard.impulse)
