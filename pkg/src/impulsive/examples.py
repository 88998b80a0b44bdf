"""Module providing the catalogue of example impulsive systems.

Each example wires a vector field, the impulsive region D, the landing
region Dhat and an impulse, and carries a list of expected facts with their
provenance:
    - annulus: rotation of an annulus with a contracting radial impulse.
    - predator_prey: predator-prey flow with harvesting at x = 1.
    - radial_disk: radial contraction with a radial push by δ (explosion
      of the non-wandering set at δ = 0).
    - torus_linear: irrational linear flow on the torus with a wandering
      band between D and Dhat.
    - disk_billiard: billiard in the unit disk with a reflecting impulse.
    - lorenz_skew: skew-product model of the geometric Lorenz flow. The
      sections cannot be interchanged.

The nested-disk construction with continua of non-hyperbolic orbits is not
provided: its flow extension is not determined by the data given for it.
"""

import copy
import math

from dataclasses import dataclass

from .common import BadParams, ConfigError, UnknownExample, check_param, check_valid_required
from .fields import create_field
from .fields.torus import GOLDEN_SLOPE
from .flow import IntegratorOpts
from .impulse import Impulse
from .section import create_section
from .semiflow import ImpulsiveSystem


@dataclass(frozen=True)
class Fact:
    """Expected fact of an example.

    provenance is "STATED" for facts stated by the theory the example
    illustrates, "DERIVED" for closed-form computations and "TRIVIAL" for
    contract checks.
    """

    quantity: str
    value: object
    provenance: str
    tolerance: float = 0.0
    kind: str = "value"
    note: str = None

    def to_record(self):
        return {'quantity': self.quantity, 'value': self.value, 'provenance': self.provenance,
                'tolerance': self.tolerance, 'kind': self.kind, 'note': self.note}


@dataclass
class ExampleSpec:
    """Fully wired example system and its expected facts."""

    name: str
    field: object
    D: object
    Dhat: object
    impulse: object
    facts: tuple
    params: dict
    opts: IntegratorOpts
    start: list
    horizon: float
    allow_invalid: bool = False
    summary: str = ""

    def system(self):
        """Create the validated impulsive system.

        :rtype: impulsive.ImpulsiveSystem
        :raises: InvalidSystem
        """
        return ImpulsiveSystem.create(self.field, self.D, self.Dhat, self.impulse, self.opts, self.allow_invalid)

    def fact(self, quantity):
        """Return the fact with the given quantity name."""
        for f in self.facts:
            if f.quantity == quantity:
                return f
        raise KeyError(quantity)

    def to_config(self):
        """Return the inline scenario description of the example."""
        return {
            'system': self.field.to_config(),
            'sections': {'D': self.D.to_config(), 'Dhat': self.Dhat.to_config()},
            'impulse': self.impulse.to_config(),
            'integrator': self.opts.to_config(),
            'allow_invalid': self.allow_invalid}


def _merge(name, defaults, params):
    """Merge parameters over the defaults of an example."""
    params = {} if params is None else params
    try:
        check_valid_required(params, set(defaults.keys()), set())
    except ConfigError as e:
        raise BadParams(f"Invalid parameters for example '{name}'. {e}", params)
    merged = copy.deepcopy(defaults)
    merged.update(params)
    return merged


def _checked(name, params, key, **kwargs):
    try:
        check_param(key, params, **kwargs)
    except ConfigError as e:
        raise BadParams(f"Invalid parameters for example '{name}'. {e}", params)


def _annulus(params):
    p = _merge("annulus", {'slope': 0.5}, params)
    _checked("annulus", p, 'slope', is_num=True, gr=0, lo=1)
    field = create_field("annulus_rotation")
    D = create_section("D", {'type': "segment", 'origin': [0, 0], 'direction': [1, 0], 'lo': [1], 'hi': [2], 'boundary_margin': 0})
    Dhat = create_section("Dhat", {'type': "segment", 'origin': [0, 0], 'direction': [-1, 0], 'lo': [1], 'hi': [1.5], 'boundary_margin': 0})
    I = Impulse.from_config({'base': "affine", 'params': {'matrix': [[p['slope']]], 'source_point': [1], 'target_point': [1]}}, D, Dhat)
    facts = (
        Fact("fixed_radius", 1.0, "DERIVED", 1e-8),
        Fact("period", math.pi, "DERIVED", 1e-8),
        Fact("multiplier", p['slope'], "DERIVED", 1e-8),
        Fact("return_map", "rho -> 1 + slope*(rho - 1)", "DERIVED", kind="property"),
        Fact("recurrent_band", 0.03, "DERIVED", kind="bound",
             note="The non-wandering arc through D is derived from the coordinates and differs from the stated quarter arc."))
    return dict(field=field, D=D, Dhat=Dhat, impulse=I, facts=facts, params=p,
                opts=IntegratorOpts(step=1e-2), start=[-1.25, 0.0], horizon=10.0,
                summary="Rotation of the annulus 1 <= r <= 2 with radial impulse r -> 1 + slope*(r - 1).")


def _predator_prey(params):
    p = _merge("predator_prey", {}, params)
    field = create_field("predator_prey")
    D = create_section("D", {'type': "segment", 'origin': [1, 0], 'direction': [0, 1], 'lo': [0], 'hi': [2], 'boundary_margin': 0})
    Dhat = create_section("Dhat", {'type': "segment", 'origin': [0.5, 0], 'direction': [0, 1], 'lo': [0], 'hi': [2], 'boundary_margin': 0})
    I = Impulse.from_config({'base': "affine", 'params': {'matrix': [[0.5]]}}, D, Dhat)
    facts = (
        Fact("equilibrium", [2.0, 1.0], "STATED", 0.0),
        Fact("segment_period", math.log(2.5) / 3, "DERIVED", 1e-6,
             note="Logistic growth from x = 1/2 to x = 1 takes ln(5/2)/3; the value ln(5)/3 corresponds to x = 1/4."),
        Fact("segment_multiplier", 0.5 * 2 ** (-1 / 3) * 1.25 ** (2 / 3), "DERIVED", 1e-6),
        Fact("multiplier_bound", 0.5, "DERIVED", kind="bound"))
    return dict(field=field, D=D, Dhat=Dhat, impulse=I, facts=facts, params=p,
                opts=IntegratorOpts(step=1e-3), start=[0.5, 0.5], horizon=5.0,
                summary="Predator-prey flow on [0,4]x[0,2]; at x = 1 the state jumps to (1/2, y/2).")


def _radial_disk(params):
    p = _merge("radial_disk", {'delta': 0.5}, params)
    _checked("radial_disk", p, 'delta', is_num=True, ge=0, lo=2)
    delta = p['delta']
    field = create_field("radial_disk")
    D = create_section("D", {'type': "circle", 'center': [0, 0], 'radius': 1})
    Dhat = create_section("Dhat", {'type': "circle", 'center': [0, 0], 'radius': 1 + delta})
    I = Impulse.from_config({'base': "affine", 'params': {'matrix': [[1]]}}, D, Dhat)
    facts = (
        Fact("tau1", math.log(1 + delta), "DERIVED", 1e-8),
        Fact("multiplier", 1.0, "DERIVED", 1e-8),
        Fact("explosion_distance", 1.0, "STATED", kind="bound",
             note=f"The coordinates give a distance of 1 + delta = {1 + delta}; the stated value is 1."))
    return dict(field=field, D=D, Dhat=Dhat, impulse=I, facts=facts, params=p,
                opts=IntegratorOpts(step=1e-2, t_max=50.0), start=[0.0, 1 + delta], horizon=5.0,
                allow_invalid=delta == 0,
                summary="Radial contraction of the disk of radius 3; the unit circle is pushed out to radius 1 + delta.")


def _torus_linear(params):
    p = _merge("torus_linear", {'alpha': GOLDEN_SLOPE, 'landing': math.pi / 2, 'shift': 0.0, 'kappa': 0.0}, params)
    _checked("torus_linear", p, 'alpha', is_num=True)
    _checked("torus_linear", p, 'landing', is_num=True, gr=0, lo=2 * math.pi)
    _checked("torus_linear", p, 'shift', is_num=True)
    _checked("torus_linear", p, 'kappa', is_num=True, gr=-1, lo=1)
    field = create_field("torus_linear", {'alpha': p['alpha']})
    D = create_section("D", {'type': "torus_circle", 'x0': 0.0})
    Dhat = create_section("Dhat", {'type': "torus_circle", 'x0': p['landing']})
    I = Impulse.from_config({'base': "circle_map", 'params': {'shift': p['shift'], 'kappa': p['kappa']}}, D, Dhat)
    facts = (
        Fact("wandering_band", [0.0, p['landing']], "STATED", kind="property"),
        Fact("flight_time", 2 * math.pi - p['landing'], "DERIVED", 1e-9))
    return dict(field=field, D=D, Dhat=Dhat, impulse=I, facts=facts, params=p,
                opts=IntegratorOpts(step=1e-2), start=[p['landing'], 0.0], horizon=20.0,
                summary="Linear flow of slope alpha on the torus; the circle x = 0 jumps to x = landing.")


def _disk_billiard(params):
    p = _merge("disk_billiard", {'theta': math.pi / 4, 'half_width': 0.4, 'theta_max': 1.2, 'restitution': 1.0}, params)
    _checked("disk_billiard", p, 'half_width', is_num=True, gr=0, lo=math.pi / 2)
    _checked("disk_billiard", p, 'theta_max', is_num=True, gr=0, lo=math.pi / 2)
    _checked("disk_billiard", p, 'theta', is_num=True, gr=-p['theta_max'], lo=p['theta_max'])
    _checked("disk_billiard", p, 'restitution', is_num=True, gr=0, le=1)
    w, tm, theta = p['half_width'], p['theta_max'], p['theta']
    field = create_field("disk_billiard")
    box = {'type': "suspension", 'level': 0, 'wrap': [0], 'tau_axes': [0]}
    D = create_section("D", dict(box, lo=[math.pi - w, -tm], hi=[math.pi + w, tm]))
    Dhat = create_section("Dhat", dict(box, lo=[-w, -tm], hi=[w, tm]))
    I = Impulse.from_config({'base': "affine", 'params': {'matrix': [[1, 0], [0, -p['restitution']]], 'source_point': [math.pi, 0], 'target_point': [0, 0]}}, D, Dhat)
    facts = (
        Fact("flight", 2 * math.cos(theta), "STATED", 1e-12),
        Fact("period", 8 * math.cos(theta), "STATED", 1e-9,
             note="Orbit through (0, theta) with two returns."),
        Fact("period_law", "n*2cos(theta) with n = 2q/gcd(q - 2p, 2q) collisions for theta = (p/q)pi", "DERIVED", 1e-9,
             kind="property", note="Equals 2q*cos(theta) if and only if gcd(q - 2p, 2q) = 2."),
        Fact("return_map", "(x, theta) -> (x + k(pi - 2theta), theta)", "STATED", 1e-10, kind="property"),
        Fact("tau1_sup", 0.0, "DERIVED", 1e-8))
    return dict(field=field, D=D, Dhat=Dhat, impulse=I, facts=facts, params=p,
                opts=IntegratorOpts(), start=[0.0, theta, 0.0], horizon=20.0,
                summary="Billiard in the unit disk; collisions near -1 are reflected to collisions near 1. "
                        "A restitution below 1 scales the reflected angle (inelastic collisions).")


def _lorenz_skew(params):
    p = _merge("lorenz_skew", {'a': 0.8, 'c': 1.9, 'lam': 1.0, 'interchanged': False}, params)
    _checked("lorenz_skew", p, 'interchanged', is_bool=True)
    try:
        field = create_field("lorenz_skew", {'a': p['a'], 'c': p['c'], 'lam': p['lam']})
    except ConfigError as e:
        raise BadParams(f"Invalid parameters for example 'lorenz_skew'. {e}", params)
    sigma = {'type': "suspension", 'level': 0, 'lo': [-1, -1], 'hi': [1, 1]}
    cusps = {'type': "suspension", 'level': math.pi, 'lo': [-1, -1], 'hi': [1, 1]}
    if p['interchanged']:
        D, Dhat = create_section("D", cusps), create_section("Dhat", sigma)
    else:
        D, Dhat = create_section("D", sigma), create_section("Dhat", cusps)
    I = Impulse.from_config({'base': "affine", 'params': {'matrix': [[1, 0], [0, 1]]}}, D, Dhat)
    facts = (
        Fact("expansion", math.sqrt(2), "STATED", kind="bound", note="f'(x) > sqrt(2) on samples."),
        Fact("contraction", 1.0, "STATED", kind="bound", note="|dH/dx|, |dH/dy| < 1."),
        Fact("tau1_sup_finite", not p['interchanged'], "STATED", kind="property"),
        Fact("skew_product", "(x, y) -> (f(x), H(x, y)) = P2(P1(x, y))", "STATED", 1e-12, kind="property",
             note="The impulse is the identity chart map, so the impulsive return map equals the return leg P2. "
                  "The skew product is the composition of the section transitions P1 and P2 of the field."))
    return dict(field=field, D=D, Dhat=Dhat, impulse=I, facts=facts, params=p,
                opts=IntegratorOpts(), start=[0.3, 0.2, math.pi if not p['interchanged'] else 0.0], horizon=20.0,
                allow_invalid=p['interchanged'],
                summary="Skew-product Lorenz model; jumps from the cross-section to the cusp section (or interchanged). "
                        "The impulse is the identity chart map; the skew product (f, H) is composed of the field's "
                        "section transitions P1 and P2.")


# Dictionary used to map example names to builders.
supported_examples = {
    'annulus': _annulus,
    'predator_prey': _predator_prey,
    'radial_disk': _radial_disk,
    'torus_linear': _torus_linear,
    'disk_billiard': _disk_billiard,
    'lorenz_skew': _lorenz_skew}


def make_example(name, params=None):
    """Create an example.

    :param name: example name
    :type name: str
    :param params: example parameters overriding the defaults
    :type params: dict
    :rtype: impulsive.ExampleSpec
    :raises: UnknownExample, BadParams
    """
    if name not in supported_examples:
        raise UnknownExample(f"Unknown example '{name}'. Valid examples are {sorted(supported_examples.keys())}.")
    parts = supported_examples[name](params)
    return ExampleSpec(name, **parts)


def expected_facts(name):
    """Return the expected facts of an example with default parameters.

    :raises: UnknownExample
    """
    return make_example(name).facts


def list_examples():
    """Return (name, summary, fact quantities) for every example."""
    rows = []
    for name in supported_examples:
        spec = make_example(name)
        rows.append((name, spec.summary, [f.quantity for f in spec.facts]))
    return rows
