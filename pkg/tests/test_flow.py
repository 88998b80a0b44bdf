"""Tests of flow integration and the variational equation."""

import logging
import math

import numpy as np
import pytest

from impulsive import ConfigError, DomainError, IntegratorOpts, create_field, flow, flow_with_jacobian


FD_STEP = 1e-6
FD_TOL = 1e-4


def test_zero_duration_is_identity():
    field = create_field("predator_prey")
    res = flow_with_jacobian(field, [1.0, 0.5], 0.0)
    assert np.array_equal(res.endpoint, [1.0, 0.5])
    assert np.array_equal(res.jacobian, np.eye(2))


def test_annulus_flow_is_rotation():
    field = create_field("annulus_rotation")
    res = flow(field, [1.5, 0.0], math.pi / 2)
    assert np.allclose(res.endpoint, [0.0, 1.5], atol=1e-8)
    # Path times increase strictly and end at the endpoint.
    times = [t for t, _ in res.path]
    assert all(b > a for a, b in zip(times, times[1:]))
    assert np.array_equal(res.path[-1][1], res.endpoint)


def test_negative_duration():
    field = create_field("annulus_rotation")
    res = flow(field, [1.5, 0.0], -math.pi / 2)
    assert np.allclose(res.endpoint, [0.0, -1.5], atol=1e-8)


def test_outside_domain():
    field = create_field("annulus_rotation")
    with pytest.raises(DomainError):
        flow(field, [0.5, 0.0], 1.0)


def test_variational_matches_finite_differences():
    field = create_field("predator_prey")
    opts = IntegratorOpts(step=1e-2)
    rng = np.random.default_rng(1)
    for x in rng.uniform([0.5, 0.2], [2.0, 1.5], size=(20, 2)):
        jac = flow_with_jacobian(field, x, 0.5, opts).jacobian
        fd = np.zeros((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = FD_STEP
            plus = flow(field, x + e, 0.5, opts).endpoint
            minus = flow(field, x - e, 0.5, opts).endpoint
            fd[:, j] = (plus - minus) / (2 * FD_STEP)
        assert np.max(np.abs(jac - fd)) <= FD_TOL


def test_billiard_speed_along_chord():
    field = create_field("disk_billiard")
    theta = 0.3
    chord = field.flight(theta)
    start = np.array([0.2, theta, 0.0])
    positions = [field.position(flow(field, start, s).endpoint) for s in np.linspace(0, 0.9 * chord, 10)]
    steps = [np.linalg.norm(b - a) for a, b in zip(positions, positions[1:])]
    assert np.allclose(steps, 0.1 * chord, atol=1e-12)


def test_billiard_flow_wraps_collisions():
    field = create_field("disk_billiard")
    theta = math.pi / 4
    chord = field.flight(theta)
    res = flow(field, [0.0, theta, 0.0], 2.5 * chord)
    assert res.endpoint[2] == pytest.approx(0.5 * chord, abs=1e-12)
    assert res.endpoint[0] == pytest.approx(2 * (math.pi - 2 * theta))


def test_halving_warning(caplog):
    field = create_field("predator_prey")
    opts = IntegratorOpts(step=0.5, tol=1e-14)
    with caplog.at_level(logging.WARNING):
        flow(field, [1.0, 0.5], 1.0, opts)
    assert any(r.getMessage().startswith("Flow:") for r in caplog.records)


def test_integrator_opts_from_config():
    defaults = IntegratorOpts(step=1e-2)
    opts = IntegratorOpts.from_config({'tol': 1e-6}, defaults=defaults)
    assert opts.step == 1e-2
    assert opts.tol == 1e-6
    with pytest.raises(ConfigError):
        IntegratorOpts.from_config({'step': -1.0})
    with pytest.raises(ConfigError):
        IntegratorOpts.from_config({'steps': 1.0})


@pytest.mark.parametrize("kind, lo, hi", [
    ("annulus_rotation", [1.0, 0.2], [1.4, 1.0]),
    ("predator_prey", [0.5, 0.2], [2.0, 1.5]),
    ("radial_disk", [-2.0, -2.0], [2.0, 2.0]),
    ("torus_linear", [0.0, 0.0], [2 * math.pi, 2 * math.pi])])
def test_semigroup(kind, lo, hi):
    field = create_field(kind)
    opts = IntegratorOpts()
    rng = np.random.default_rng(7)
    for x in rng.uniform(lo, hi, size=(5, 2)):
        s, t = rng.uniform(0, 1, size=2)
        twice = flow(field, flow(field, x, s, opts).endpoint, t, opts).endpoint
        once = flow(field, x, s + t, opts).endpoint
        assert np.max(np.abs(twice - once)) <= 10 * opts.tol


def test_annulus_jacobian_is_rotation():
    field = create_field("annulus_rotation")
    res = flow_with_jacobian(field, [1.5, 0.0], math.pi)
    assert np.allclose(res.endpoint, [-1.5, 0.0], atol=1e-10)
    assert np.allclose(res.jacobian, [[-1.0, 0.0], [0.0, -1.0]], atol=1e-10)


def test_radial_jacobian_is_contraction():
    field = create_field("radial_disk")
    T = 0.7
    res = flow_with_jacobian(field, [1.5, 0.5], T)
    assert np.allclose(res.endpoint, math.exp(-T) * np.array([1.5, 0.5]), atol=1e-10)
    assert np.allclose(res.jacobian, math.exp(-T) * np.eye(2), atol=1e-10)


def test_halving_only_when_needed(caplog):
    # RK4 is exact for constant fields, so the tolerance that makes the
    # predator-prey flow warn is met without halving.
    field = create_field("torus_linear")
    opts = IntegratorOpts(step=0.5, tol=1e-14)
    with caplog.at_level(logging.WARNING):
        res = flow(field, [0.0, 0.0], 2.0, opts)
    assert not caplog.records
    assert np.allclose(res.endpoint, [2.0, 2.0 * field.params['alpha']], atol=1e-12)
