"""Module providing impulses and their C1-bounded perturbations.

An impulse maps chart points of the impulsive region D to chart points of
the landing region Dhat. It consists of a closed-form base map followed by a
stack of localized bumps h_1, ..., h_m acting on the target side, i.e.
J = h_m∘...∘h_1∘base. Bumps use the quintic profile
β(s) = 1 − 10s³ + 15s⁴ − 6s⁵ on [0, 1] (zero for s ≥ 1).
"""

import copy
import logging
import math

import networkx as nx
import numpy as np

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from scipy.spatial import cKDTree

from .common import (BudgetExceeded, ChartError, ConfigError, IncompatibleSections, SingularityError,
                     SupportOutsideChart, check_param, check_valid_required, wrap_angle)
from .section import transversality_margin


# Maximum of |β′| on [0, 1].
C_BETA = 15 / 8
# Default ratio between bump radius and jump length.
LAMBDA = 4.0
# Maximum number of chart samples used by grid-sampled C1 distances.
MAX_SAMPLES = 250_000


def beta(s):
    """Return the quintic bump profile."""
    s = np.asarray(s, dtype=float)
    return np.where(s < 1, 1 - 10 * s ** 3 + 15 * s ** 4 - 6 * s ** 5, 0.0)


def beta_prime(s):
    """Return the derivative β′(s) = −30 s²(1 − s)²."""
    s = np.asarray(s, dtype=float)
    return np.where(s < 1, -30 * s ** 2 * (1 - s) ** 2, 0.0)


def _profile_constants():
    """Return max sβ(s) and max β(s) + s|β′(s)| on [0, 1].

    Both maxima are taken on a dense grid and rounded up.
    """
    s = np.linspace(0, 1, 200001)
    m = float(np.max(s * beta(s)))
    k = float(np.max(beta(s) + s * np.abs(beta_prime(s))))
    return m * (1 + 1e-6), k * (1 + 1e-6)


# Value and slope constants of linear bumps.
M_BETA, K_BETA = _profile_constants()


class BASE_KIND(str, Enum):
    """Kinds of base maps."""
    AFFINE = "affine"
    CIRCLE_MAP = "circle_map"


class BUMP_KIND(str, Enum):
    """Kinds of bumps."""
    TRANSLATE = "translate"
    LINEAR = "linear"


class BaseMap(ABC):
    """Closed-form base map between section charts.

    Abstract base class. Maps act on arrays of chart points of shape (n, k).
    """

    KIND = None
    CONF_VALID_KEYS = set()

    def __init__(self, params, dim):
        params = {} if params is None else copy.deepcopy(params)
        check_valid_required(params, self.CONF_VALID_KEYS, set())
        self._dim = dim
        self._params = params
        self._check_params(params)

    def _check_params(self, params):
        pass

    @property
    def kind(self):
        """Return the base map kind."""
        return self.KIND

    @abstractmethod
    def apply(self, u):
        """Apply the map to chart points of shape (n, k)."""
        pass

    @abstractmethod
    def jacobian(self, u):
        """Return the Jacobians of shape (n, k, k)."""
        pass

    @abstractmethod
    def lipschitz(self):
        """Return an upper bound of sup‖D base‖."""
        pass

    def to_config(self):
        """Return the base map description."""
        return {'base': self.KIND.value, 'params': copy.deepcopy(self._params)}


class AffineMap(BaseMap):
    """Affine map u ↦ target_point + A(u − source_point)."""

    KIND = BASE_KIND.AFFINE
    CONF_VALID_KEYS = {'matrix', 'source_point', 'target_point'}

    def _check_params(self, params):
        k = self._dim
        self._A = np.array(params.get('matrix', np.eye(k).tolist()), dtype=float).reshape(k, k)
        self._a = np.array(params.get('source_point', [0.0] * k), dtype=float).reshape(k)
        self._b = np.array(params.get('target_point', [0.0] * k), dtype=float).reshape(k)
        if not np.all(np.isfinite(self._A)) or abs(np.linalg.det(self._A)) < 1e-12:
            raise ConfigError("The matrix of an affine base map must be finite and invertible.", params)

    def apply(self, u):
        return self._b + (u - self._a) @ self._A.T

    def jacobian(self, u):
        return np.broadcast_to(self._A, (len(u), self._dim, self._dim)).copy()

    def lipschitz(self):
        return float(np.linalg.norm(self._A, 2))


class CircleMap(BaseMap):
    """Circle diffeomorphism u ↦ u + shift + kappa·sin(u), |kappa| < 1."""

    KIND = BASE_KIND.CIRCLE_MAP
    CONF_VALID_KEYS = {'shift', 'kappa'}

    def _check_params(self, params):
        if self._dim != 1:
            raise ConfigError("Circle maps require one-dimensional charts.", params)
        check_param('shift', params, required=False, is_num=True)
        check_param('kappa', params, required=False, is_num=True, gr=-1, lo=1)
        self._shift = float(params.get('shift', 0.0))
        self._kappa = float(params.get('kappa', 0.0))

    def apply(self, u):
        return u + self._shift + self._kappa * np.sin(u)

    def jacobian(self, u):
        return (1 + self._kappa * np.cos(u)).reshape(len(u), 1, 1)

    def lipschitz(self):
        return 1 + abs(self._kappa)


# Dictionary used to map base kinds to classes.
supported_bases = {
    'affine': AffineMap,
    'circle_map': CircleMap}


def create_base(kind, params, dim):
    """Create a base map.

    :param kind: base map kind
    :type kind: str
    :param params: base map parameters
    :type params: dict
    :param dim: chart dimension
    :type dim: int
    :rtype: impulsive.impulse.BaseMap
    :raises: ConfigError
    """
    kind = kind.value if isinstance(kind, BASE_KIND) else kind
    check_param('base', kind, is_str=True, options=set(supported_bases.keys()))
    return supported_bases[kind](params, dim)


@dataclass(frozen=True)
class Bump:
    """Localized bump acting on target chart points.

    A translate bump moves the centre by the payload vector; a linear bump
    fixes the centre and adds the payload matrix E to the derivative there.
    """

    kind: BUMP_KIND
    center: tuple
    radius: float
    payload: tuple
    periodic: tuple = ()

    @property
    def matrix(self):
        """Return the payload as array."""
        return np.array(self.payload, dtype=float)

    @property
    def value_bound(self):
        """Return an upper bound of sup‖h(v) − v‖."""
        if self.kind == BUMP_KIND.TRANSLATE:
            return float(np.linalg.norm(self.matrix))
        return float(np.linalg.norm(self.matrix, 2)) * self.radius * M_BETA

    @property
    def slope_bound(self):
        """Return an upper bound of sup‖Dh − Id‖."""
        if self.kind == BUMP_KIND.TRANSLATE:
            return float(np.linalg.norm(self.matrix)) * C_BETA / self.radius
        return float(np.linalg.norm(self.matrix, 2)) * K_BETA

    def c1_bound(self, lipschitz):
        """Return the C1 distance bound of h∘G vs G for sup‖DG‖ ≤ lipschitz."""
        return max(self.value_bound, self.slope_bound * lipschitz)

    def _offsets(self, v):
        d = v - np.array(self.center, dtype=float)
        for axis in self.periodic:
            d[:, axis] = wrap_angle(d[:, axis])
        return d

    def apply(self, v):
        """Apply the bump to points of shape (n, k)."""
        d = self._offsets(v)
        b = beta(np.linalg.norm(d, axis=1) / self.radius)
        if self.kind == BUMP_KIND.TRANSLATE:
            return v + b[:, None] * self.matrix[None, :]
        return v + b[:, None] * (d @ self.matrix.T)

    def jacobian(self, v):
        """Return the Jacobians Dh of shape (n, k, k)."""
        d = self._offsets(v)
        n, k = d.shape
        norm = np.linalg.norm(d, axis=1)
        s = norm / self.radius
        with np.errstate(divide='ignore', invalid='ignore'):
            scale = np.where(norm > 0, beta_prime(s) / (self.radius * norm), 0.0)
        grad = scale[:, None] * d
        jac = np.broadcast_to(np.eye(k), (n, k, k)).copy()
        if self.kind == BUMP_KIND.TRANSLATE:
            jac += self.matrix[None, :, None] * grad[:, None, :]
        else:
            E = self.matrix
            jac += beta(s)[:, None, None] * E[None, :, :]
            jac += (d @ E.T)[:, :, None] * grad[:, None, :]
        return jac

    def to_config(self):
        """Return the bump description."""
        payload = self.matrix.tolist()
        return {'kind': self.kind.value, 'center': list(self.center), 'radius': self.radius, 'payload': payload}

    @classmethod
    def from_config(cls, config, periodic=()):
        """Create a bump from its description.

        :raises: ConfigError
        """
        check_valid_required(config, {'kind', 'center', 'radius', 'payload'}, {'kind', 'center', 'radius', 'payload'})
        check_param('kind', config, is_str=True, options={k.value for k in BUMP_KIND})
        check_param('radius', config, is_num=True, gr=0)
        check_param('center', config, is_list=True)
        kind = BUMP_KIND(config['kind'])
        payload = np.array(config['payload'], dtype=float)
        return cls(kind, tuple(float(c) for c in config['center']), float(config['radius']), _as_tuple(payload), tuple(periodic))


def _as_tuple(a):
    """Convert an array into nested tuples."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return tuple(float(x) for x in a)
    return tuple(tuple(float(x) for x in row) for row in a)


@dataclass
class ValidationReport:
    """Result of validating an impulse against a vector field."""

    hausdorff_gap: float
    landing_transversal: bool
    transversality: float
    tau1_sup_bound: float

    @property
    def verdict(self):
        """Return True if the impulse is admissible."""
        return bool(self.hausdorff_gap > 0 and self.landing_transversal and math.isfinite(self.tau1_sup_bound))

    def to_record(self):
        """Return the report as JSON compatible dictionary."""
        return {
            'hausdorff_gap': self.hausdorff_gap,
            'landing_transversal': self.landing_transversal,
            'transversality': self.transversality,
            'tau1_sup_bound': self.tau1_sup_bound if math.isfinite(self.tau1_sup_bound) else "inf",
            'verdict': self.verdict}


class Impulse:
    """Impulse from the chart of D to the chart of Dhat.

    Impulses are immutable; perturbations return new instances.
    """

    def __init__(self, base, source, target, bumps=()):
        """Initialize the impulse.

        :param base: base map
        :type base: impulsive.impulse.BaseMap
        :param source: impulsive region D
        :type source: impulsive.CrossSection
        :param target: landing region Dhat
        :type target: impulsive.CrossSection
        :param bumps: bump stack in application order
        :type bumps: tuple of impulsive.Bump
        """
        if source.chart_dim() != target.chart_dim():
            raise ConfigError(f"Sections '{source.name}' and '{target.name}' have different chart dimensions.")
        self._base = base
        self._source = source
        self._target = target
        self._bumps = tuple(bumps)

    @property
    def base(self):
        """Return the base map."""
        return self._base

    @property
    def source(self):
        """Return the source section D."""
        return self._source

    @property
    def target(self):
        """Return the target section Dhat."""
        return self._target

    @property
    def bumps(self):
        """Return the bump stack."""
        return self._bumps

    def with_bump(self, bump):
        """Return the impulse with an additional bump on the target side."""
        return Impulse(self._base, self._source, self._target, self._bumps + (bump,))

    def with_base(self, base):
        """Return the impulse with a different base map and no bumps."""
        return Impulse(base, self._source, self._target)

    def _points(self, u):
        u = np.asarray(u, dtype=float)
        single = u.ndim == 1
        u = np.atleast_2d(u)
        if u.shape[1] != self._source.chart_dim() or not self._source.contains(u):
            raise ChartError(f"Chart point(s) outside the chart box of section '{self._source.name}'.")
        return u, single

    def apply(self, u):
        """Apply the impulse to chart point(s) of shape (k,) or (n, k)."""
        u, single = self._points(u)
        v = self._base.apply(u)
        for bump in self._bumps:
            v = bump.apply(v)
        v = self._target.normalize(v)
        return v[0] if single else v

    def jacobian(self, u):
        """Return the Jacobian(s) of shape (k, k) or (n, k, k)."""
        u, single = self._points(u)
        v = self._base.apply(u)
        jac = self._base.jacobian(u)
        for bump in self._bumps:
            jac = bump.jacobian(v) @ jac
            v = bump.apply(v)
        return jac[0] if single else jac

    def lipschitz(self):
        """Return an upper bound of sup‖DI‖."""
        return impulse_lipschitz(self)

    def to_config(self):
        """Return the scenario description of the impulse."""
        config = self._base.to_config()
        config['source'] = self._source.name
        config['target'] = self._target.name
        config['bumps'] = [b.to_config() for b in self._bumps]
        return config

    @classmethod
    def from_config(cls, config, source, target):
        """Create an impulse from its scenario description.

        :param config: impulse description
        :type config: dict
        :param source: impulsive region D
        :type source: impulsive.CrossSection
        :param target: landing region Dhat
        :type target: impulsive.CrossSection
        :rtype: impulsive.Impulse
        :raises: ConfigError
        """
        check_valid_required(config, {'base', 'params', 'bumps', 'source', 'target'}, {'base'})
        try:
            base = create_base(config['base'], config.get('params'), target.chart_dim())
            bumps = tuple(Bump.from_config(b, target.periodic) for b in config.get('bumps', []))
        except ConfigError as e:
            raise ConfigError(f"Error in the configuration of the impulse. {e}", config)
        return cls(base, source, target, bumps)

    def __repr__(self):
        return f"Impulse({self._base.kind.value}, '{self._source.name}'->'{self._target.name}', bumps={len(self._bumps)})"


def apply(I, u):
    """Apply the impulse to a source chart point.

    :param I: impulse
    :type I: impulsive.Impulse
    :param u: source chart point
    :returns: target chart point
    :raises: ChartError
    """
    return I.apply(u)


def jacobian(I, u):
    """Return the Jacobian of the impulse at a source chart point.

    :raises: ChartError
    """
    return I.jacobian(u)


def support_clusters(bumps):
    """Group bumps whose supports are connected by pairwise overlaps.

    Every bump maps its support ball into itself, so a target point is only
    ever moved by the bumps of a single group.

    :param bumps: bump stack
    :type bumps: tuple of impulsive.Bump
    :returns: lists of stack indices in application order
    :rtype: list
    """
    m = len(bumps)
    G = nx.Graph()
    G.add_nodes_from(range(m))
    if m > 1:
        centers = np.array([b.center for b in bumps], dtype=float)
        radii = np.array([b.radius for b in bumps])
        d = centers[:, None, :] - centers[None, :, :]
        for axis in bumps[0].periodic:
            d[..., axis] = wrap_angle(d[..., axis])
        overlap = np.linalg.norm(d, axis=2) < radii[:, None] + radii[None, :]
        G.add_edges_from((int(i), int(j)) for i, j in np.argwhere(np.triu(overlap, 1)))
    return sorted(sorted(c) for c in nx.connected_components(G))


def impulse_lipschitz(I):
    """Return an upper bound of sup‖DI‖ over the source chart.

    The base bound is multiplied by the largest product of (1 + slope) over
    the groups of overlapping bumps.

    :param I: impulse
    :type I: impulsive.Impulse
    :rtype: float
    """
    factor = 1.0
    for cluster in support_clusters(I.bumps):
        factor = max(factor, math.prod(1 + I.bumps[i].slope_bound for i in cluster))
    return I.base.lipschitz() * factor


def _same_sections(I1, I2):
    return (I1.source.name == I2.source.name and I1.target.name == I2.target.name
            and I1.source.to_config() == I2.source.to_config() and I1.target.to_config() == I2.target.to_config())


def _is_extension(I1, I2):
    """Return True if I2 = bumps∘I1."""
    n = len(I1.bumps)
    return I1.base.to_config() == I2.base.to_config() and I2.bumps[:n] == I1.bumps


def analytic_c1_bound(I1, I2):
    """Return the C1 bound of I2 = bumps∘I1.

    Per-bump bounds add up within a group of overlapping supports. Groups
    act on disjoint parts of the target chart, so the largest group sum is
    returned.
    """
    L1 = impulse_lipschitz(I1)
    added = I2.bumps[len(I1.bumps):]
    bound = 0.0
    for cluster in support_clusters(added):
        L, total = L1, 0.0
        for i in cluster:
            total += added[i].c1_bound(L)
            L *= 1 + added[i].slope_bound
        bound = max(bound, total)
    return bound


def sampled_c1_distance(I1, I2, max_samples=MAX_SAMPLES):
    """Return the C1 distance sampled on a dense grid of the source chart.

    The grid step does not exceed the boundary margin of the source section
    (1e-3 for sections without margin), subject to the sample cap.
    """
    S = I1.source
    k = S.chart_dim()
    step = S.boundary_margin if S.boundary_margin > 0 else 1e-3
    extent = float(np.max(S.hi - S.lo))
    n = max(2, min(math.ceil(extent / step), int(max_samples ** (1 / k))))
    u = S.samples(n)
    dv = I1.target.chart_delta(I1.apply(u), I2.apply(u))
    dj = I1.jacobian(u) - I2.jacobian(u)
    value = float(np.max(np.linalg.norm(dv, axis=1)))
    slope = float(np.max(np.linalg.norm(dj, ord=2, axis=(1, 2))))
    return max(value, slope)


def c1_distance(I1, I2, method="auto"):
    """Return the C1 distance between two impulses.

    The distance is the maximum of the sup-norms of the value difference and
    of the Jacobian difference. If I2 extends the bump stack of I1, the sum of
    the analytic per-bump bounds is returned, otherwise the distance is
    sampled on a dense chart grid.

    :param I1: impulse
    :type I1: impulsive.Impulse
    :param I2: impulse
    :type I2: impulsive.Impulse
    :param method: "auto", "analytic" or "sampled"
    :type method: str
    :rtype: float
    :raises: IncompatibleSections
    """
    if not _same_sections(I1, I2):
        raise IncompatibleSections(f"Impulses {I1} and {I2} act between different sections.")
    if method == "sampled" or (method == "auto" and not _is_extension(I1, I2)):
        return sampled_c1_distance(I1, I2)
    if not _is_extension(I1, I2):
        raise IncompatibleSections("Analytic C1 bounds require the second impulse to extend the bump stack of the first.")
    return analytic_c1_bound(I1, I2)


def min_ambient_distance(a, b, periodic_axes=()):
    """Return the minimum distance between two ambient point sets.

    Coordinates listed in periodic_axes are identified mod 2π.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    both = np.vstack([a, b])
    lo = both.min(axis=0)
    span = both.max(axis=0) - lo
    boxsize = 4 * span + 1.0
    a, b = a - lo, b - lo
    for axis in periodic_axes:
        boxsize[axis] = 2 * math.pi
        for pts in (a, b):
            reduced = np.mod(pts[:, axis] + lo[axis], 2 * math.pi)
            pts[:, axis] = np.where(reduced >= 2 * math.pi, 0.0, reduced)
    tree = cKDTree(b, boxsize=boxsize)
    dist, _ = tree.query(a)
    return float(np.min(dist))


def hausdorff_gap(I, field, n=None):
    """Return the distance between D and I(D) in the ambient space.

    Both sections are sampled densely in chart coordinates.
    """
    D, Dhat = I.source, I.target
    if n is None:
        n = 256 if D.chart_dim() == 1 else 64
    u = D.samples(n)
    v = I.apply(u)
    xd = np.array([D.chart(p) for p in u])
    xi = np.array([Dhat.chart(p) for p in v])
    return min_ambient_distance(xi, xd, field.periodic_axes)


def validate(I, field, opts=None, tau1_sup=None, grid_res=8):
    """Validate an impulse against a vector field.

    :param I: impulse
    :type I: impulsive.Impulse
    :param field: vector field
    :type field: impulsive.fields.Field
    :param opts: integrator options used by the τ₁ derivative estimate
    :type opts: impulsive.IntegratorOpts
    :param tau1_sup: precomputed τ₁ derivative bound (impulse independent)
    :type tau1_sup: float
    :param grid_res: grid resolution of the τ₁ derivative estimate
    :type grid_res: int
    :rtype: impulsive.ValidationReport
    """
    gap = hausdorff_gap(I, field)
    try:
        margin = transversality_margin(I.target, field)
    except SingularityError as e:
        logging.warning(f"Impulse: {e}")
        margin = 0.0
    if tau1_sup is None:
        from .semiflow import tau1_sup_for_sections
        tau1_sup = tau1_sup_for_sections(field, I.source, I.target, opts, grid_res)
    report = ValidationReport(gap, margin > 0, margin, tau1_sup)
    logging.info(f"Impulse: Validation of {I} gave gap={gap:.4g}, transversality={margin:.4g}, tau1 bound={tau1_sup:.4g}, verdict={report.verdict}.")
    return report


def _check_support(I, p, r):
    T = I.target
    if T.periodic and r >= math.pi:
        raise SupportOutsideChart(f"Bump radius {r:.4g} exceeds half the period of section '{T.name}'.")
    if not T.contains(p, slack=0.0) or T.boundary_distance(p) < r:
        raise SupportOutsideChart(f"Bump support of radius {r:.4g} at {np.asarray(p).tolist()} leaves the chart box of section '{T.name}'.")


def translate_ratio(lipschitz, eps):
    """Return the smallest ratio λ ≥ 4 of bump radius and jump length whose
    slope bound fits into the budget eps."""
    return max(LAMBDA, C_BETA * lipschitz / eps * (1 + 1e-9))


def bump_translate(I, p, q, eps, lam=None, lipschitz=None):
    """Compose the impulse with a bump moving p to q.

    The bump is supported in the ball of radius λ‖q − p‖ around p. Without an
    explicit λ, the smallest λ ≥ 4 fitting the slope bound into the budget
    is chosen. Callers stacking bumps with disjoint supports pass the
    Lipschitz bound of the unperturbed impulse.

    :param I: impulse
    :type I: impulsive.Impulse
    :param p: target chart point
    :param q: target chart point
    :param eps: C1 budget
    :type eps: float
    :param lam: ratio of bump radius and jump length
    :type lam: float
    :param lipschitz: bound of sup‖DG‖ for the map the bump is composed with
    :type lipschitz: float
    :rtype: impulsive.Impulse
    :raises: BudgetExceeded, SupportOutsideChart
    """
    T = I.target
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    d = T.chart_delta(q, p)
    dist = float(np.linalg.norm(d))

    # Drop zero bumps.
    if dist == 0:
        return I
    if eps <= 0:
        raise BudgetExceeded(f"A jump of length {dist:.4g} does not fit into the budget {eps}.")

    L = impulse_lipschitz(I) if lipschitz is None else lipschitz
    if lam is None:
        lam = translate_ratio(L, eps)
    bump = Bump(BUMP_KIND.TRANSLATE, _as_tuple(p), lam * dist, _as_tuple(d), tuple(T.periodic))
    # The bump must stay a diffeomorphism.
    if bump.slope_bound >= 1:
        raise BudgetExceeded(f"Translate bump with jump {dist:.4g} and radius {bump.radius:.4g} is not a diffeomorphism (slope bound {bump.slope_bound:.4g}).")
    bound = bump.c1_bound(L)
    if bound > eps:
        raise BudgetExceeded(f"Translate bump with jump {dist:.4g} and radius {bump.radius:.4g} has C1 bound {bound:.4g} > {eps}.")
    _check_support(I, p, bump.radius)
    logging.debug(f"Impulse: Added translate bump at {p.tolist()} with jump {dist:.4g} and radius {bump.radius:.4g}.")
    return I.with_bump(bump)


def bump_linear(I, p, E, r, eps=None):
    """Compose the impulse with a bump h fixing p with Dh(p) = Id + E.

    :param I: impulse
    :type I: impulsive.Impulse
    :param p: target chart point
    :param E: derivative change (k × k)
    :param r: support radius
    :type r: float
    :param eps: optional C1 budget
    :type eps: float
    :rtype: impulsive.Impulse
    :raises: BudgetExceeded, SupportOutsideChart
    """
    T = I.target
    k = T.chart_dim()
    p = np.asarray(p, dtype=float).reshape(-1)
    E = np.asarray(E, dtype=float).reshape(k, k)
    check_param('r', r, is_num=True, gr=0)

    if not np.any(E):
        return I
    bump = Bump(BUMP_KIND.LINEAR, _as_tuple(p), float(r), _as_tuple(E), tuple(T.periodic))
    # The bump must stay a diffeomorphism.
    if bump.slope_bound >= 1:
        raise BudgetExceeded(f"Linear bump with ‖E‖={np.linalg.norm(E, 2):.4g} is not a diffeomorphism (slope bound {bump.slope_bound:.4g}).")
    if eps is not None:
        bound = bump.c1_bound(impulse_lipschitz(I))
        if bound > eps:
            raise BudgetExceeded(f"Linear bump has C1 bound {bound:.4g} > {eps}.")
    _check_support(I, p, r)
    logging.debug(f"Impulse: Added linear bump at {p.tolist()} with radius {r:.4g}.")
    return I.with_bump(bump)
