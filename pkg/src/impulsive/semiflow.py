"""Module providing the impulsive semiflow.

The impulsive semiflow follows the flow until it hits the impulsive region
D, jumps by the impulse to the landing region Dhat and continues. Hits are
detected by sampling the event function of D at every base step of the
integrator and bisecting sign changes.
"""

import logging
import math

import numpy as np

from dataclasses import dataclass, field as dc_field

from .common import (AnalysisError, BoundaryHit, ConfigError, DomainError, GrazingHit, InvalidSystem,
                     MultipleCrossings, NoCrossing, NoReturn, StepError)
from .fields import require_exact_section
from .flow import IntegratorOpts, check_state, eval_field, initial_state, rk4_step, state_rhs
from .impulse import validate
from .section import chart_to_ambient


# Refinement ratio above which the τ₁ derivative is considered divergent.
DIVERGENCE_RATIO = 1.9
# Derivatives below this value never count as divergent.
DIVERGENCE_FLOOR = 1e-6


@dataclass
class HitResult:
    """First hit of the impulsive region.

    tau1 is +∞ if there is no hit within the horizon; all other fields are
    None in that case. dtau1 is the gradient of τ₁ in ambient coordinates and
    hit_jacobian the derivative of x ↦ φ_{τ₁(x)}(x).
    """

    tau1: float
    hit_chart: np.ndarray = None
    point: np.ndarray = None
    dtau1: np.ndarray = None
    hit_jacobian: np.ndarray = None
    velocity: np.ndarray = None
    grazing: bool = False
    transversality: float = None

    @property
    def finite(self):
        """Return True if D is hit within the horizon."""
        return math.isfinite(self.tau1)


@dataclass(frozen=True)
class Jump:
    """Jump of an impulsive trajectory."""

    index: int
    time: float
    pre: np.ndarray
    post: np.ndarray


@dataclass(frozen=True)
class Arc:
    """Continuous piece of an impulsive trajectory."""

    start: float
    end: float
    path: list


@dataclass
class Trajectory:
    """Impulsive trajectory made of flow arcs and jumps."""

    arcs: list = dc_field(default_factory=list)
    jumps: list = dc_field(default_factory=list)
    endpoint: np.ndarray = None

    def rows(self, field):
        """Return CSV rows (t, x1..xd, jump_flag).

        The first row of every arc following a jump carries the flag 1.
        Periodic coordinates are reduced mod 2π.
        """
        rows = []
        for i, arc in enumerate(self.arcs):
            for j, (t, x) in enumerate(arc.path):
                flag = 1 if (i > 0 and j == 0) else 0
                rows.append([t] + field.reduce(x).tolist() + [flag])
        return rows

    def jump_rows(self):
        """Return CSV rows (n, τ_n, pre-chart, post-chart)."""
        return [[j.index + 1, j.time] + list(j.pre) + list(j.post) for j in self.jumps]


@dataclass
class ReturnResult:
    """Result of one application of the Poincaré map."""

    point: np.ndarray
    tau: float
    jacobian: np.ndarray
    hit: HitResult


@dataclass
class ScanResult:
    hits: list
    end: np.ndarray
    time: float
    stalled: bool


@dataclass(frozen=True)
class ImpulsiveSystem:
    """Impulsive dynamical system (flow, D, Dhat, impulse).

    Use :meth:`create` to construct validated systems.
    """

    field: object
    D: object
    Dhat: object
    impulse: object
    opts: IntegratorOpts
    validation: object
    allow_invalid: bool = False

    @classmethod
    def create(cls, field, D, Dhat, impulse, opts=None, allow_invalid=False, tau1_sup=None):
        """Create and validate an impulsive system.

        :param field: vector field
        :type field: impulsive.fields.Field
        :param D: impulsive region
        :type D: impulsive.CrossSection
        :param Dhat: landing region
        :type Dhat: impulsive.CrossSection
        :param impulse: impulse from D to Dhat
        :type impulse: impulsive.Impulse
        :param opts: integrator options
        :type opts: impulsive.IntegratorOpts
        :param allow_invalid: True to accept systems failing validation
        :type allow_invalid: bool
        :param tau1_sup: precomputed τ₁ derivative bound
        :type tau1_sup: float
        :rtype: impulsive.ImpulsiveSystem
        :raises: ConfigError, InvalidSystem
        """
        # Check parameters.
        if impulse.source.name != D.name or impulse.target.name != Dhat.name:
            raise ConfigError(f"The impulse maps '{impulse.source.name}' to '{impulse.target.name}', but the system uses '{D.name}' and '{Dhat.name}'.")
        for S in (D, Dhat):
            if field.exact:
                require_exact_section(S, field)
            if len(S.chart(S.lo)) != field.dim:
                raise ConfigError(f"Section '{S.name}' does not lie in the {field.dim}-dimensional ambient space of the {field.kind.value} field.")

        opts = IntegratorOpts() if opts is None else opts
        report = validate(impulse, field, opts, tau1_sup)
        if not report.verdict and not allow_invalid:
            raise InvalidSystem(f"The impulse {impulse} is not admissible for the {field.kind.value} field: {report.to_record()}.", report)
        return cls(field, D, Dhat, impulse, opts, report, allow_invalid)

    def with_impulse(self, J):
        """Return the system with a different impulse.

        The τ₁ derivative bound only depends on the flow and the sections and
        is reused.
        """
        return ImpulsiveSystem.create(self.field, self.D, self.Dhat, J, self.opts, self.allow_invalid, self.validation.tau1_sup_bound)


def _bisect(rhs, S, z, h, sign0, opts, d):
    """Localize a sign change of g within one step by bisection."""
    lo, hi = 0.0, h
    for _ in range(opts.bisect_iter):
        if abs(hi - lo) <= opts.time_tol:
            break
        mid = 0.5 * (lo + hi)
        gm = S.g(rk4_step(rhs, z, mid)[:d])
        if gm * sign0 > 0:
            lo = mid
        else:
            hi = mid
    return hi, rk4_step(rhs, z, hi)


def _scan(field, S, x, t_end, opts, with_jacobian=False, path=None, first_only=True, stall=True):
    """Integrate towards t_end and record the crossings of S.

    The search starts at t > 0: a zero of g at the initial point is skipped.
    Crossings outside the chart box of S are ignored.
    """
    d = field.dim
    rhs = state_rhs(field, with_jacobian)
    z = initial_state(x, with_jacobian)
    h_base = math.copysign(opts.step, t_end) if t_end != 0 else opts.step
    t = 0.0
    g_prev = S.g(z[:d])
    sign_prev = np.sign(g_prev)
    hits = []
    if path is not None:
        path.append((0.0, z[:d].copy()))

    while abs(t) < abs(t_end):
        h = h_base if abs(t + h_base) <= abs(t_end) else t_end - t
        z_new = rk4_step(rhs, z, h)
        check_state(field, z_new)
        g_new = S.g(z_new[:d])
        if sign_prev != 0 and g_new * sign_prev <= 0:
            sigma, z_hit = _bisect(rhs, S, z, h, sign_prev, opts, d)
            u = S.locate(z_hit[:d])
            if u is not None and S.contains(u):
                hits.append((t + sigma, z_hit))
                if first_only:
                    if path is not None:
                        path.append((t + sigma, z_hit[:d].copy()))
                    return ScanResult(hits, z_hit, t + sigma, False)
        if g_new != 0:
            sign_prev = np.sign(g_new)
        t += h
        z = z_new
        if path is not None:
            path.append((t, z[:d].copy()))
        if stall and np.linalg.norm(field.eval(z[:d])) < opts.stall_speed:
            logging.debug(f"Semiflow: Trajectory stalled at {z[:d].tolist()} after time {t:.6g}.")
            return ScanResult(hits, z, t, True)
    return ScanResult(hits, z, t, False)


def _hit(field, D, opts, x, t_max, strict=True, with_jacobian=True, path=None):
    """Compute the first hit of D from x.

    :returns: hit result, final state of the search and stall flag
    :rtype: tuple
    """
    x = np.asarray(x, dtype=float)
    eval_field(field, x)
    d = field.dim

    if field.exact:
        data = field.exact_first_hit(x, D, t_max)
        if data is None:
            if path is not None:
                end, arc, _ = field.exact_flow(x, t_max)
                path.extend(arc)
                return HitResult(math.inf), end, False
            return HitResult(math.inf), None, False
        tau, y, dhit, dtau = data
        if path is not None:
            path.extend(field.exact_flow(x, tau)[1])
        if not with_jacobian:
            dhit = dtau = None
        end, stalled = y, False
    else:
        scan = _scan(field, D, x, t_max, opts, with_jacobian, path)
        if not scan.hits:
            return HitResult(math.inf), scan.end[:d], scan.stalled
        tau, z = scan.hits[0]
        y = z[:d]
        dhit = dtau = None
        end, stalled = y, False

    # Transversality of the crossing.
    X = field.eval(y)
    grad = D.grad_g(y)
    speed = np.linalg.norm(X)
    margin = abs(grad @ X) / (np.linalg.norm(grad) * speed) if speed > 0 else 0.0
    grazing = margin < opts.grazing_guard
    if grazing and strict:
        raise GrazingHit(f"Grazing hit of section '{D.name}' at {y.tolist()} (transversality {margin:.3e}).")

    if with_jacobian and not field.exact:
        phi = z[d:].reshape(d, d)
        with np.errstate(divide='ignore', invalid='ignore'):
            dtau = -(grad @ phi) / (grad @ X)
        dhit = phi + np.outer(X, dtau)

    u = D.clip(D.locate(y))
    if strict and D.boundary_distance(u) < D.boundary_margin:
        raise BoundaryHit(f"Hit {u.tolist()} lies within the boundary margin {D.boundary_margin} of section '{D.name}'.")
    return HitResult(tau, u, y, dtau, dhit, X, grazing, margin), end, stalled


def first_hit(sys, x, t_max=None, strict=True, with_jacobian=True):
    """Return the first hit of the impulsive region.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param x: ambient point
    :type x: numpy.ndarray
    :param t_max: horizon (default: integrator option t_max)
    :type t_max: float
    :param strict: True to raise on grazing and boundary hits
    :type strict: bool
    :param with_jacobian: True to compute dτ₁ and the hit Jacobian
    :type with_jacobian: bool
    :rtype: impulsive.HitResult
    :raises: GrazingHit, BoundaryHit, DomainError, StepError
    """
    t_max = sys.opts.t_max if t_max is None else t_max
    hit, _, _ = _hit(sys.field, sys.D, sys.opts, x, t_max, strict, with_jacobian)
    return hit


def trajectory(sys, x, T):
    """Compute the impulsive trajectory of x up to time T.

    Jumps occurring within the event tolerance after T are still applied.
    The computation stops early if the trajectory stalls at an equilibrium.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param x: ambient point
    :type x: numpy.ndarray
    :param T: horizon
    :type T: float
    :rtype: impulsive.Trajectory
    :raises: AnalysisError (with the index of the offending jump)
    """
    if T < 0:
        raise ConfigError(f"The horizon of an impulsive trajectory must be non-negative, but {T} has been specified.")
    opts = sys.opts
    traj = Trajectory()
    x = np.asarray(x, dtype=float)
    t = 0.0

    while True:
        horizon = T - t + opts.event_tol
        if horizon <= 0:
            traj.endpoint = x
            break
        path = []
        try:
            hit, end, stalled = _hit(sys.field, sys.D, opts, x, horizon, True, False, path)
        except AnalysisError as e:
            e.jump_index = len(traj.jumps)
            raise
        shifted = [(t + s, p) for s, p in path]
        if not hit.finite:
            if stalled:
                shifted.append((T, end.copy()))
            traj.arcs.append(Arc(t, T, shifted))
            traj.endpoint = end
            break
        t_hit = t + hit.tau1
        traj.arcs.append(Arc(t, t_hit, shifted))
        post = sys.impulse.apply(hit.hit_chart)
        traj.jumps.append(Jump(len(traj.jumps), t_hit, hit.hit_chart, post))
        x = sys.Dhat.chart(post)
        t = t_hit
        if T - t <= opts.event_tol:
            traj.arcs.append(Arc(t, t, [(t, x.copy())]))
            traj.endpoint = x
            break

    logging.debug(f"Semiflow: Trajectory up to time {T} with {len(traj.jumps)} jumps.")
    return traj


def poincare_full(sys, v, with_jacobian=True):
    """Apply the Poincaré map P_I = I∘φ_τ once.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param v: Dhat chart point
    :param with_jacobian: True to compute DP_I (chart to chart)
    :type with_jacobian: bool
    :rtype: impulsive.semiflow.ReturnResult
    :raises: NoReturn, GrazingHit, BoundaryHit, ChartError
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    x = chart_to_ambient(sys.Dhat, v)
    hit = first_hit(sys, x, with_jacobian=with_jacobian)
    if not hit.finite:
        raise NoReturn(f"No return to section '{sys.D.name}' from {v.tolist()} within {sys.opts.t_max}.")
    point = sys.impulse.apply(hit.hit_chart)
    jac = None
    if with_jacobian:
        jac = sys.impulse.jacobian(hit.hit_chart) @ sys.D.locate_jacobian(hit.point) @ hit.hit_jacobian @ sys.Dhat.chart_jacobian(v)
    return ReturnResult(point, hit.tau1, jac, hit)


def poincare(sys, v):
    """Apply the Poincaré map.

    :returns: next Dhat chart point and flight time
    :rtype: tuple
    :raises: NoReturn, GrazingHit, BoundaryHit, ChartError
    """
    ret = poincare_full(sys, v, with_jacobian=False)
    return ret.point, ret.tau


def poincare_jacobian(sys, v):
    """Return the derivative of the Poincaré map in chart coordinates.

    :raises: NoReturn, GrazingHit, BoundaryHit, ChartError
    """
    return poincare_full(sys, v).jacobian


def _chart_dtau(hit, Dhat, v):
    """Return the derivative of τ₁ along the τ axes of the Dhat chart."""
    grad = hit.dtau1 @ Dhat.chart_jacobian(v)
    return float(np.linalg.norm(grad[list(Dhat.tau_axes)]))


def tau1_sup_for_sections(field, D, Dhat, opts=None, grid_res=8):
    """Estimate sup |dτ₁| over the landing region.

    Takes the maximum over the cell centres of grids with grid_res, 2·grid_res
    and 4·grid_res cells per axis, skipping cells without regular return. The
    estimate is +∞ if the maximum grows by a factor of at least 1.9 under
    both refinements.
    """
    opts = IntegratorOpts() if opts is None else opts
    maxima = []
    for n in (grid_res, 2 * grid_res, 4 * grid_res):
        m = 0.0
        for v in Dhat.grid(n):
            try:
                hit, _, _ = _hit(field, D, opts, Dhat.chart(v), opts.t_max)
            except (GrazingHit, BoundaryHit, DomainError, StepError):
                continue
            if hit.finite:
                m = max(m, _chart_dtau(hit, Dhat, v))
        maxima.append(m)
    logging.debug(f"Semiflow: τ₁ derivative maxima under refinement: {maxima}.")
    if maxima[0] > DIVERGENCE_FLOOR and maxima[1] >= DIVERGENCE_RATIO * maxima[0] and maxima[2] >= DIVERGENCE_RATIO * maxima[1]:
        return math.inf
    return max(maxima)


def tau1_derivative_sup(sys, grid_res=8):
    """Estimate sup |dτ₁| over the landing region of the system.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param grid_res: cells per chart axis of the coarsest grid
    :type grid_res: int
    :rtype: float (+∞ if divergent)
    """
    return tau1_sup_for_sections(sys.field, sys.D, sys.Dhat, sys.opts, grid_res)


def min_flight_time(sys):
    """Return the lower bound of flight times from the gap and the speed bound."""
    return sys.validation.hausdorff_gap / sys.field.speed_bound()


def discontinuity_report(sys, grid_res=32):
    """Classify the cells of the landing region by their return behaviour.

    :returns: counts per status ("return", "no_return", "grazing",
      "boundary", "domain") and the per-cell statuses
    :rtype: dict
    """
    counts = {'return': 0, 'no_return': 0, 'grazing': 0, 'boundary': 0, 'domain': 0}
    cells = []
    for v in sys.Dhat.grid(grid_res):
        try:
            hit = first_hit(sys, sys.Dhat.chart(v), with_jacobian=False)
            status = 'return' if hit.finite else 'no_return'
        except GrazingHit:
            status = 'grazing'
        except BoundaryHit:
            status = 'boundary'
        except (DomainError, StepError):
            status = 'domain'
        counts[status] += 1
        cells.append((v.tolist(), status))
    return {'counts': counts, 'cells': cells}


def holonomy(field, S1, S2, u, r, opts=None):
    """Return the holonomy of the flow from S1 to S2.

    Finds the unique time θ ∈ [−r, r] with φ_θ(x) ∈ S2 for x = chart(S1, u).

    :param field: vector field (not of exact kind)
    :type field: impulsive.fields.Field
    :param S1: source section
    :type S1: impulsive.CrossSection
    :param S2: target section
    :type S2: impulsive.CrossSection
    :param u: S1 chart point
    :param r: time bound
    :type r: float
    :param opts: integrator options
    :type opts: impulsive.IntegratorOpts
    :returns: S2 chart point and signed time
    :rtype: tuple
    :raises: NoCrossing, MultipleCrossings
    """
    if field.exact:
        raise ConfigError(f"Holonomies are only supported for integrated fields, not for the {field.kind.value} field.")
    opts = IntegratorOpts() if opts is None else opts
    x = chart_to_ambient(S1, u)
    crossings = []

    # Crossing at time zero.
    if abs(S2.g(x)) <= 1e-12:
        v = S2.locate(x)
        if v is not None and S2.contains(v):
            crossings.append((0.0, S2.clip(v)))
    for t_end in (r, -r):
        scan = _scan(field, S2, x, t_end, opts, first_only=False, stall=False)
        for t, z in scan.hits:
            if abs(t) > opts.time_tol:
                crossings.append((t, S2.clip(S2.locate(z[:field.dim]))))

    if not crossings:
        raise NoCrossing(f"No crossing of section '{S2.name}' within time {r}.")
    if len(crossings) > 1:
        raise MultipleCrossings(f"{len(crossings)} crossings of section '{S2.name}' within time {r}.")
    theta, v = crossings[0]
    return v, theta
