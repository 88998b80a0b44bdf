"""Acceptance tests of the expected facts of the example catalogue.

Every fact of every example is read by exactly one test named
test_<example>_<quantity>.
"""

import math

import numpy as np
import pytest

from impulsive import (build_graph, chain_recurrent_ambient, chain_recurrent_cells, create_field, expected_facts,
                       find_periodic, first_hit, flow, hausdorff_distance, make_example, poincare, tau1_derivative_sup,
                       trajectory)


NAMES = ["annulus", "predator_prey", "radial_disk", "torus_linear", "disk_billiard", "lorenz_skew"]


def _fact(name, quantity, params=None):
    return make_example(name, params).fact(quantity)


def test_every_fact_has_a_test():
    for name in NAMES:
        for fact in expected_facts(name):
            assert f"test_{name}_{fact.quantity}" in globals(), fact.quantity


# Annulus


def test_annulus_fixed_radius(annulus):
    fact = _fact("annulus", "fixed_radius")
    orbit = find_periodic(annulus, [1.25])
    assert orbit.points[0, 0] == pytest.approx(fact.value, abs=fact.tolerance)


def test_annulus_period(annulus):
    fact = _fact("annulus", "period")
    assert find_periodic(annulus, [1.25]).period == pytest.approx(fact.value, abs=fact.tolerance)


def test_annulus_multiplier(annulus):
    fact = _fact("annulus", "multiplier")
    multiplier = find_periodic(annulus, [1.25]).multipliers[0]
    assert multiplier.real == pytest.approx(fact.value, abs=fact.tolerance)
    assert multiplier.imag == pytest.approx(0.0, abs=fact.tolerance)


def test_annulus_return_map(annulus):
    fact = _fact("annulus", "return_map")
    slope = make_example("annulus").params['slope']
    for rho in np.linspace(1.05, 1.45, 9):
        v, _ = poincare(annulus, [rho])
        assert v[0] == pytest.approx(1 + slope * (rho - 1), abs=1e-8), fact.value


def test_annulus_recurrent_band(annulus):
    band = _fact("annulus", "recurrent_band").value
    graph = build_graph(annulus, 0.01, 0.01)
    cells = chain_recurrent_cells(graph)
    assert graph.grid.cell_of([1.0]) in cells
    for c in cells:
        assert abs(graph.grid.center(c)[0] - 1.0) <= band


# Predator-prey


def test_predator_prey_equilibrium():
    p = _fact("predator_prey", "equilibrium").value
    field = create_field("predator_prey")
    assert np.array_equal(field.eval(np.array(p)), [0.0, 0.0])


def test_predator_prey_segment_period(predator_prey):
    fact = _fact("predator_prey", "segment_period")
    assert find_periodic(predator_prey, [0.2]).period == pytest.approx(fact.value, abs=fact.tolerance)


def test_predator_prey_segment_multiplier(predator_prey):
    fact = _fact("predator_prey", "segment_multiplier")
    multiplier = abs(find_periodic(predator_prey, [0.2]).multipliers[0])
    assert multiplier == pytest.approx(fact.value, abs=fact.tolerance)


def test_predator_prey_multiplier_bound(predator_prey):
    bound = _fact("predator_prey", "multiplier_bound").value
    rng = np.random.default_rng(4)
    for seed in rng.uniform(0.05, 1.5, size=5):
        assert abs(find_periodic(predator_prey, [seed]).multipliers[0]) < bound


# Radial disk


def test_radial_disk_tau1(radial):
    fact = _fact("radial_disk", "tau1")
    for angle in (0.0, 0.7, 4.0):
        hit = first_hit(radial, radial.Dhat.chart([angle]))
        assert hit.tau1 == pytest.approx(fact.value, abs=fact.tolerance)


def test_radial_disk_multiplier(radial):
    fact = _fact("radial_disk", "multiplier")
    orbit = find_periodic(radial, [1.0])
    assert abs(orbit.multipliers[0]) == pytest.approx(fact.value, abs=fact.tolerance)


def test_radial_disk_explosion_distance(radial, radial_collapsed):
    """Chain-recurrent sets of δ = 0 and δ = 0.5 are far apart."""
    distance = _fact("radial_disk", "explosion_distance").value
    h = delta = 0.1
    collapsed = chain_recurrent_ambient(radial_collapsed, build_graph(radial_collapsed, h, delta))
    exploded = chain_recurrent_ambient(radial, build_graph(radial, h, delta))
    assert np.allclose(collapsed, [[0.0, 0.0]])
    assert hausdorff_distance(collapsed, exploded) >= distance - (h + delta)
    radii = np.linalg.norm(exploded, axis=1)
    assert radii.max() == pytest.approx(1.5, abs=1e-9)


# Torus


def test_torus_linear_wandering_band(torus):
    """Points between D and its image are visited once and never again."""
    lo, hi = _fact("torus_linear", "wandering_band").value
    traj = trajectory(torus, [0.5 * (lo + hi), 1.0], 40.0)
    assert len(traj.jumps) >= 6
    first = [x[0] for _, x in traj.arcs[0].path]
    assert lo < first[0] < hi
    for arc in traj.arcs[1:]:
        for _, x in arc.path:
            assert not lo + 1e-6 < x[0] % (2 * math.pi) < hi - 1e-6


def test_torus_linear_flight_time(torus):
    fact = _fact("torus_linear", "flight_time")
    for v in (0.0, 1.0, 5.0):
        _, tau = poincare(torus, [v])
        assert tau == pytest.approx(fact.value, abs=fact.tolerance)


# Disk billiard


def test_disk_billiard_flight():
    fact = _fact("disk_billiard", "flight")
    theta = make_example("disk_billiard").params['theta']
    field = create_field("disk_billiard")
    # Chord between consecutive collisions at angles 0 and π − 2θ.
    rot = math.pi - 2 * theta
    chord = math.hypot(math.cos(rot) - 1, math.sin(rot))
    assert chord == pytest.approx(fact.value, abs=fact.tolerance)
    assert field.flight(theta) == pytest.approx(fact.value, abs=fact.tolerance)
    start = field.position(np.array([0.0, theta, 0.0]))
    end = field.position(flow(field, [0.0, theta, 0.0], 0.999 * fact.value).endpoint)
    assert np.linalg.norm(end - start) == pytest.approx(0.999 * fact.value, abs=1e-9)


def test_disk_billiard_period(billiard):
    fact = _fact("disk_billiard", "period")
    theta = make_example("disk_billiard").params['theta']
    orbit = find_periodic(billiard, [0.1, theta], N=2)
    assert orbit.period == pytest.approx(fact.value, abs=fact.tolerance)


@pytest.mark.parametrize("p, q", [(1, 4), (1, 3), (2, 5)])
def test_disk_billiard_period_law(billiard, p, q):
    """Period of the billiard orbit of angle (p/q)π."""
    fact = _fact("disk_billiard", "period_law")
    theta = p / q * math.pi
    collisions = 2 * q // math.gcd(q - 2 * p, 2 * q)
    period, n = billiard.field.orbit_period(0.3, theta)
    assert n == collisions
    assert period == pytest.approx(collisions * 2 * math.cos(theta), abs=fact.tolerance)
    if math.gcd(q - 2 * p, 2 * q) == 2:
        assert period == pytest.approx(2 * q * math.cos(theta), abs=fact.tolerance)


def test_disk_billiard_return_map(billiard):
    """The pre-impulse hit is the collision map iterated until it enters D."""
    fact = _fact("disk_billiard", "return_map")
    Dhat, D = billiard.Dhat, billiard.D
    rng = np.random.default_rng(3)
    starts = rng.uniform(Dhat.lo, Dhat.hi, size=(1000, 2))
    for x, theta in starts:
        hit = first_hit(billiard, Dhat.chart([x, theta]), strict=False, with_jacobian=False)
        rot = math.pi - 2 * theta
        k = 1
        while abs(math.remainder(x + k * rot - math.pi, 2 * math.pi)) > 0.4:
            k += 1
        expected = math.pi + math.remainder(x + k * rot - math.pi, 2 * math.pi)
        assert hit.hit_chart == pytest.approx([expected, theta], abs=fact.tolerance)
        assert hit.tau1 == pytest.approx(2 * k * math.cos(theta), abs=fact.tolerance)
        assert D.contains(hit.hit_chart)


def test_disk_billiard_tau1_sup(billiard):
    fact = _fact("disk_billiard", "tau1_sup")
    assert tau1_derivative_sup(billiard) == pytest.approx(fact.value, abs=fact.tolerance)


# Lorenz skew product


def test_lorenz_skew_expansion():
    bound = _fact("lorenz_skew", "expansion").value
    field = make_example("lorenz_skew").field
    for x in np.linspace(-1, 1, 201):
        if x == 0:
            continue
        assert field.f_prime(x) > bound


def test_lorenz_skew_contraction():
    bound = _fact("lorenz_skew", "contraction").value
    field = make_example("lorenz_skew").field
    rng = np.random.default_rng(2)
    for x, y in rng.uniform(-1, 1, size=(50, 2)):
        assert all(abs(d) < bound for d in field.H_partials(x, y))


def test_lorenz_skew_tau1_sup_finite():
    for interchanged in (False, True):
        spec = make_example("lorenz_skew", {'interchanged': interchanged})
        sys = spec.system()
        assert math.isfinite(sys.validation.tau1_sup_bound) == spec.fact("tau1_sup_finite").value
        assert sys.validation.verdict == spec.fact("tau1_sup_finite").value


def test_lorenz_skew_skew_product():
    fact = _fact("lorenz_skew", "skew_product")
    field = make_example("lorenz_skew").field
    for x, y in [(0.3, 0.2), (-0.7, -0.5), (0.05, 0.9)]:
        image, _ = field.P1([x, y])
        image, _ = field.P2(image)
        assert image == pytest.approx([field.f(x), field.H(x, y)], abs=fact.tolerance)
