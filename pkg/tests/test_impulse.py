"""Tests of impulses, bumps and C1 distances."""

import numpy as np
import pytest

from impulsive import (BudgetExceeded, ChartError, ConfigError, Impulse, ImpulsiveSystem, IncompatibleSections,
                       InvalidSystem, SupportOutsideChart, apply, bump_linear, bump_translate, c1_distance,
                       impulse_lipschitz, jacobian, make_example, support_clusters, translate_ratio)
from impulsive.impulse import K_BETA, LAMBDA, create_base


# Slack of sampled C1 distances against analytic bounds.
C1_SLACK = 0.05


def _with_slope(I, slope):
    return I.with_base(create_base("affine", {'matrix': [[slope]], 'source_point': [1], 'target_point': [1]}, 1))


def test_affine_impulse(annulus):
    I = annulus.impulse
    assert apply(I, [1.5])[0] == pytest.approx(1.25)
    assert jacobian(I, [1.5])[0, 0] == pytest.approx(0.5)
    assert impulse_lipschitz(I) == pytest.approx(0.5)
    with pytest.raises(ChartError):
        apply(I, [2.5])


def test_impulse_config():
    spec = make_example("annulus")
    I = Impulse.from_config(spec.impulse.to_config(), spec.D, spec.Dhat)
    assert I.apply(np.array([1.8]))[0] == pytest.approx(1.4)
    with pytest.raises(ConfigError):
        Impulse.from_config({'base': "affine", 'params': {'matrix': [[0.0]]}}, spec.D, spec.Dhat)
    with pytest.raises(ConfigError):
        Impulse.from_config({'base': "shear"}, spec.D, spec.Dhat)


def test_validation_of_annulus(annulus):
    report = annulus.validation
    assert report.hausdorff_gap == pytest.approx(2.0)
    assert report.landing_transversal
    assert report.verdict
    assert report.to_record()['verdict'] is True


def test_zero_gap_is_invalid():
    spec = make_example("radial_disk", {'delta': 0.0})
    with pytest.raises(InvalidSystem) as info:
        ImpulsiveSystem.create(spec.field, spec.D, spec.Dhat, spec.impulse, spec.opts, tau1_sup=0.0)
    assert info.value.report.hausdorff_gap == pytest.approx(0.0, abs=1e-12)


def test_translate_bump_on_torus(torus):
    I = torus.impulse
    J = bump_translate(I, [0.0], [0.01], 0.5, lam=4)
    bump = J.bumps[-1]
    assert bump.radius == pytest.approx(0.04)
    assert bump.value_bound == pytest.approx(0.01)
    assert bump.slope_bound == pytest.approx(0.46875)
    assert J.apply(np.array([0.0]))[0] == pytest.approx(0.01)
    # Points outside the support are not moved.
    assert J.apply(np.array([1.0]))[0] == pytest.approx(I.apply(np.array([1.0]))[0])
    assert c1_distance(I, J) == pytest.approx(0.46875)


def test_translate_bump_budget(torus):
    with pytest.raises(BudgetExceeded):
        bump_translate(torus.impulse, [0.0], [0.5], 0.01)
    with pytest.raises(BudgetExceeded):
        bump_translate(torus.impulse, [0.0], [0.01], 0.0)
    assert bump_translate(torus.impulse, [1.0], [1.0], 0.0) is torus.impulse


def test_translate_bump_support(predator_prey):
    with pytest.raises(SupportOutsideChart):
        bump_translate(predator_prey.impulse, [0.05], [0.06], 1.0, lam=10)


def test_translate_bump_bound(radial):
    J = bump_translate(radial.impulse, [1.0], [1.01], 0.5, lam=10)
    assert c1_distance(radial.impulse, J) == pytest.approx(0.1875)


def test_linear_bump(annulus):
    I = annulus.impulse
    J = bump_linear(I, [1.25], [[0.1]], 0.1)
    assert J.apply(np.array([1.5]))[0] == pytest.approx(1.25)
    assert J.jacobian(np.array([1.5]))[0, 0] == pytest.approx(0.55)
    with pytest.raises(BudgetExceeded):
        bump_linear(I, [1.25], [[1.0]], 0.1)
    with pytest.raises(BudgetExceeded):
        bump_linear(I, [1.25], [[0.1]], 0.1, eps=1e-3)
    with pytest.raises(SupportOutsideChart):
        bump_linear(I, [1.05], [[0.1]], 0.1)


def test_sampled_distance_of_bases(annulus):
    I = annulus.impulse
    assert c1_distance(I, _with_slope(I, 0.6)) == pytest.approx(0.1, rel=1e-6)


def test_incompatible_sections(annulus, torus):
    with pytest.raises(IncompatibleSections):
        c1_distance(annulus.impulse, torus.impulse)


def test_perturbation_contracts(annulus):
    """Random bumps stay within their budget, confirmed by grid sampling."""
    I = annulus.impulse
    rng = np.random.default_rng(7)
    for i in range(1000):
        p = rng.uniform(1.1, 1.4)
        if i % 2 == 0:
            eps = rng.uniform(0.05, 0.5)
            q = p + rng.choice([-1, 1]) * rng.uniform(1e-4, 5e-3)
            J = bump_translate(I, [p], [q], eps)
        else:
            eta = rng.uniform(-0.5, 0.5) / K_BETA
            r = rng.uniform(0.02, 0.09)
            eps = max(abs(eta) * r, abs(eta) * K_BETA * impulse_lipschitz(I)) * 1.01
            J = bump_linear(I, [p], [[eta]], r, eps)
        analytic = c1_distance(I, J, method="analytic")
        sampled = c1_distance(I, J, method="sampled")
        assert analytic <= eps * (1 + 1e-9)
        assert sampled <= (1 + C1_SLACK) * analytic


def test_perturbation_contracts_in_two_dimensions(billiard):
    I = billiard.impulse
    rng = np.random.default_rng(11)
    for _ in range(10):
        p = rng.uniform([-0.2, -0.6], [0.2, 0.6])
        q = p + rng.uniform(-2e-3, 2e-3, size=2)
        eps = rng.uniform(0.1, 0.5)
        J = bump_translate(I, p, q, eps)
        analytic = c1_distance(I, J, method="analytic")
        assert analytic <= eps * (1 + 1e-9)
        assert c1_distance(I, J, method="sampled") <= (1 + C1_SLACK) * analytic


def test_translate_bump_must_be_diffeomorphism(annulus):
    # λ = 1 gives the slope bound 15/8.
    with pytest.raises(BudgetExceeded):
        bump_translate(annulus.impulse, [1.25], [1.26], 5.0, lam=1.0)
    J = bump_translate(annulus.impulse, [1.25], [1.26], 5.0, lam=2.0)
    values = J.apply(np.linspace(1.1, 1.9, 801).reshape(-1, 1))[:, 0]
    assert np.all(np.diff(values) > 0)


def _two_bumps(I, first, second, jump=0.01):
    J = bump_translate(I, [first], [first + jump], 1.0, lam=4)
    return bump_translate(J, [second], [second - jump], 1.0, lam=4)


def test_disjoint_bumps_cost_the_maximum(torus):
    I = torus.impulse
    J = _two_bumps(I, 1.0, 3.0)
    assert support_clusters(J.bumps) == [[0], [1]]
    assert c1_distance(I, J) == pytest.approx(0.46875)
    assert impulse_lipschitz(J) == pytest.approx(1.46875)


def test_overlapping_bumps_add_up(torus):
    I = torus.impulse
    J = _two_bumps(I, 1.0, 1.02)
    assert support_clusters(J.bumps) == [[0, 1]]
    assert c1_distance(I, J) == pytest.approx(0.46875 + 0.46875 * 1.46875)
    assert impulse_lipschitz(J) == pytest.approx(1.46875 ** 2)


def test_bumps_overlap_across_the_seam(torus):
    J = _two_bumps(torus.impulse, 0.01, 2 * np.pi - 0.01)
    assert support_clusters(J.bumps) == [[0, 1]]


def test_translate_ratio():
    assert translate_ratio(1.0, 1.0) == LAMBDA
    assert translate_ratio(1.0, 0.1) == pytest.approx(18.75)
