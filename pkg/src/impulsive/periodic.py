"""Module providing periodic orbits of impulsive semiflows.

Periodic orbits are fixed points of the N-th iterate of the Poincaré map on
the landing region. They are found with a damped Newton method using the
chain rule products of the per-segment Poincaré Jacobians.
"""

import logging
import math

import numpy as np

from dataclasses import dataclass
from enum import Enum
from scipy.linalg import eigvals

from .common import (AnalysisError, ContinuationFailed, HyperbolizationFailed, NotFound, SingularJacobian,
                     check_param)
from .impulse import K_BETA, bump_linear, impulse_lipschitz
from .semiflow import min_flight_time, poincare_full


# Default Newton tolerance on ‖P^N(u) − u‖.
NEWTON_TOL = 1e-10
# Default maximum number of Newton iterations.
MAX_ITER = 50
# Condition number above which Newton steps fall back to least squares.
COND_LIMIT = 1e12
# Smallest step length factor of the line search.
MIN_DAMPING = 1 / 1024
# Default distance of multiplier moduli from 1 required for hyperbolicity.
UNIT_CIRCLE_TOL = 1e-6
# Default support radius of hyperbolizing bumps.
HYPERBOLIZE_RADIUS = 0.1
# Smallest seed offset of the isolation check of continued orbits.
ISOLATION_RADIUS = 1e-3


class ORBIT_TAG(str, Enum):
    """Hyperbolicity tags of periodic orbits."""
    HYPERBOLIC = "hyperbolic"
    NON_HYPERBOLIC = "non_hyperbolic"
    UNDETERMINED = "undetermined"


@dataclass
class PeriodicOrbit:
    """Periodic orbit of the impulsive semiflow.

    points holds the cycle x_1..x_N of landing chart points, jacobians the
    Poincaré Jacobian of every segment (at points[i], mapping to
    points[i + 1]).
    """

    points: np.ndarray
    flight_times: np.ndarray
    jacobians: np.ndarray
    tag: ORBIT_TAG = ORBIT_TAG.UNDETERMINED

    @property
    def N(self):
        """Return the number of returns."""
        return len(self.points)

    @property
    def period(self):
        """Return the period T (sum of flight times)."""
        return float(np.sum(self.flight_times))

    @property
    def monodromy(self):
        """Return the product of the per-segment Jacobians."""
        M = np.eye(self.jacobians.shape[1])
        for jac in self.jacobians:
            M = jac @ M
        return M

    @property
    def multipliers(self):
        """Return the eigenvalues of the monodromy, sorted by modulus."""
        mult = eigvals(self.monodromy)
        return mult[np.argsort(-np.abs(mult), kind='stable')]

    def rebase(self, i):
        """Return the orbit starting at points[i]."""
        return PeriodicOrbit(np.roll(self.points, -i, axis=0), np.roll(self.flight_times, -i),
                             np.roll(self.jacobians, -i, axis=0), self.tag)

    def to_record(self):
        """Return the orbit as JSON compatible dictionary."""
        mult = self.multipliers
        return {
            'points': self.points.tolist(),
            'flight_times': self.flight_times.tolist(),
            'period': self.period,
            'multipliers': [[float(m.real), float(m.imag)] for m in mult],
            'tag': self.tag.value}


@dataclass
class AuditReport:
    """Result of a hyperbolicity audit of periodic orbits."""

    orbits: list
    n_max: float
    max_returns: int
    eps_bd: float

    @property
    def verdict(self):
        """Return True if all orbits found are hyperbolic."""
        return all(o.tag == ORBIT_TAG.HYPERBOLIC for o in self.orbits)

    def to_record(self):
        """Return the report as JSON compatible dictionary."""
        counts = {tag.value: sum(1 for o in self.orbits if o.tag == tag) for tag in ORBIT_TAG}
        return {'n_max': self.n_max, 'max_returns': self.max_returns, 'eps_bd': self.eps_bd,
                'orbit_count': len(self.orbits), 'tags': counts, 'verdict': self.verdict}


def _iterate(sys, u, N, with_jacobian=True):
    """Follow N returns from u.

    :returns: residual P^N(u) − u, visited points, flight times and
      per-segment Jacobians
    """
    points, taus, jacs = [], [], []
    v = u
    for _ in range(N):
        ret = poincare_full(sys, v, with_jacobian)
        points.append(v)
        taus.append(ret.tau)
        jacs.append(ret.jacobian)
        v = ret.point
    return sys.Dhat.chart_delta(v, u), points, taus, jacs


def _residual_norm(sys, u, N):
    try:
        F, _, _, _ = _iterate(sys, u, N, with_jacobian=False)
    except AnalysisError:
        return math.inf
    return float(np.linalg.norm(F))


def find_periodic(sys, u0, N=1, tol=NEWTON_TOL, max_iter=MAX_ITER, unit_circle_tol=UNIT_CIRCLE_TOL):
    """Find a periodic orbit as fixed point of P_I^N.

    Damped Newton on F(u) = P_I^N(u) − u. Iterates are projected back into
    the chart box. Newton matrices with condition above 1e12 are replaced by
    least-squares steps.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param u0: landing chart seed
    :param N: number of returns
    :type N: int
    :param tol: tolerance on ‖F‖
    :type tol: float
    :param max_iter: maximum number of iterations
    :type max_iter: int
    :param unit_circle_tol: tolerance used to classify the orbit
    :type unit_circle_tol: float
    :rtype: impulsive.PeriodicOrbit
    :raises: NotFound, SingularJacobian
    """
    check_param('N', N, is_int=True, ge=1)
    Dhat = sys.Dhat
    k = Dhat.chart_dim()
    u = Dhat.clip(np.asarray(u0, dtype=float).reshape(k))

    for it in range(max_iter + 1):
        try:
            F, points, taus, jacs = _iterate(sys, u, N)
        except AnalysisError as e:
            raise NotFound(f"Newton iterate {u.tolist()} has no regular {N}-fold return: {e}")
        norm = float(np.linalg.norm(F))
        if norm < tol:
            break
        if it == max_iter:
            raise NotFound(f"Newton did not converge within {max_iter} iterations (residual {norm:.3e}).")

        M = np.eye(k)
        for jac in jacs:
            M = jac @ M
        A = M - np.eye(k)
        singular = np.linalg.cond(A) > COND_LIMIT
        if singular:
            step = np.linalg.lstsq(A, -F, rcond=None)[0]
        else:
            step = np.linalg.solve(A, -F)

        # Damped line search.
        lam = 1.0
        while lam >= MIN_DAMPING:
            cand = Dhat.clip(u + lam * step)
            if _residual_norm(sys, cand, N) < norm:
                u = cand
                break
            lam /= 2
        else:
            if singular:
                raise SingularJacobian(f"Newton stalled at residual {norm:.3e} with singular matrix.")
            raise NotFound(f"Newton line search failed at residual {norm:.3e}.")

    orbit = PeriodicOrbit(np.array(points), np.array(taus), np.array(jacs))
    for p in orbit.points:
        if Dhat.boundary_distance(p) < Dhat.boundary_margin:
            raise NotFound(f"Periodic orbit passes within the boundary margin of section '{Dhat.name}' at {p.tolist()}.")
    orbit.tag = classify(orbit, unit_circle_tol)
    logging.debug(f"Periodic: Found {orbit.tag.value} orbit with {N} returns and period {orbit.period:.10g}.")
    return orbit


def trace_orbit(sys, u, N, tol, unit_circle_tol=UNIT_CIRCLE_TOL):
    """Return the periodic orbit through a point known to close after N returns.

    No Newton correction is applied, so orbits with a multiplier at 1 are
    traced as well.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param u: landing chart point
    :param N: number of returns
    :type N: int
    :param tol: tolerance on ‖P^N(u) − u‖
    :type tol: float
    :rtype: impulsive.PeriodicOrbit
    :raises: NotFound
    """
    check_param('N', N, is_int=True, ge=1)
    u = sys.Dhat.normalize(np.asarray(u, dtype=float).reshape(-1))
    try:
        F, points, taus, jacs = _iterate(sys, u, N)
    except AnalysisError as e:
        raise NotFound(f"Point {u.tolist()} has no regular {N}-fold return: {e}")
    if np.linalg.norm(F) > tol:
        raise NotFound(f"Point {u.tolist()} misses itself after {N} returns by {np.linalg.norm(F):.3e}.")
    orbit = PeriodicOrbit(np.array(points), np.array(taus), np.array(jacs))
    orbit.tag = classify(orbit, unit_circle_tol)
    return orbit


def classify(orbit, unit_circle_tol=UNIT_CIRCLE_TOL):
    """Classify the hyperbolicity of a periodic orbit.

    :param orbit: periodic orbit
    :type orbit: impulsive.PeriodicOrbit
    :param unit_circle_tol: tolerance around the unit circle
    :type unit_circle_tol: float
    :rtype: impulsive.ORBIT_TAG
    """
    M = orbit.monodromy
    if not np.all(np.isfinite(M)):
        return ORBIT_TAG.UNDETERMINED
    moduli = np.abs(eigvals(M))
    if np.all(np.abs(moduli - 1) > unit_circle_tol):
        return ORBIT_TAG.HYPERBOLIC
    return ORBIT_TAG.NON_HYPERBOLIC


def _check_isolated(sysJ, orbit, new, tol):
    """Raise ContinuationFailed if Newton seeded around the old orbit finds another orbit."""
    Dhat = sysJ.Dhat
    k = Dhat.chart_dim()
    M = new.monodromy - np.eye(k)
    if not np.all(np.isfinite(M)) or np.min(np.abs(new.multipliers - 1)) < UNIT_CIRCLE_TOL or np.linalg.cond(M) > COND_LIMIT:
        raise ContinuationFailed("Continued orbit has a multiplier at 1 and is not isolated.")
    shift = float(np.linalg.norm(Dhat.chart_delta(new.points[0], orbit.points[0])))
    r = max(10 * shift, ISOLATION_RADIUS)
    seeds = list(orbit.points[1:])
    for axis in range(k):
        for sign in (-1, 1):
            seeds.append(orbit.points[0] + sign * r * np.eye(k)[axis])
    for seed in seeds:
        try:
            other = find_periodic(sysJ, seed, orbit.N, tol)
        except AnalysisError:
            continue
        if not same_orbit(new, other, 1e3 * tol, Dhat):
            raise ContinuationFailed(f"Newton from {Dhat.normalize(seed).tolist()} finds a second orbit near the continued one.")


def continue_orbit(sys, orbit, J, eps_T=None, tol=NEWTON_TOL):
    """Continue a hyperbolic orbit to a perturbed impulse.

    The continued orbit must be isolated: Newton runs seeded at the other
    points of the old orbit and at offsets of its first point converge to
    the same orbit.

    :param sys: impulsive system of the orbit
    :type sys: impulsive.ImpulsiveSystem
    :param orbit: hyperbolic periodic orbit
    :type orbit: impulsive.PeriodicOrbit
    :param J: perturbed impulse
    :type J: impulsive.Impulse
    :param eps_T: half-width of the period window (default: 10% of the period)
    :type eps_T: float
    :rtype: impulsive.PeriodicOrbit
    :raises: ContinuationFailed
    """
    eps_T = 0.1 * orbit.period if eps_T is None else eps_T
    sysJ = sys.with_impulse(J)

    for i, p in enumerate(orbit.points):
        try:
            poincare_full(sysJ, p, with_jacobian=False)
        except AnalysisError as e:
            raise ContinuationFailed(f"Segment {i} lost its crossing under the perturbed impulse: {e}", segment=i)
    try:
        new = find_periodic(sysJ, orbit.points[0], orbit.N, tol)
    except NotFound as e:
        raise ContinuationFailed(f"Newton under the perturbed impulse failed: {e}")

    if abs(new.period - orbit.period) >= eps_T:
        raise ContinuationFailed(f"Continued period {new.period:.6g} outside ({orbit.period - eps_T:.6g}, {orbit.period + eps_T:.6g}).")
    _check_isolated(sysJ, orbit, new, tol)
    logging.info(f"Periodic: Continued orbit of period {orbit.period:.8g} to period {new.period:.8g}.")
    return new


def _support_radius(sys, orbit, radius):
    """Return the bump radius at points[0].

    The support keeps clear of the chart boundary and of the other orbit
    points. It also stays outside bumps whose support misses points[0].
    """
    Dhat = sys.Dhat
    p = orbit.points[0]
    r = min(radius, 0.9 * Dhat.boundary_distance(p))
    others = orbit.points[1:]
    if len(others):
        gaps = np.linalg.norm(Dhat.chart_delta(others, p), axis=1)
        gaps = gaps[gaps > 0]
        if len(gaps):
            r = min(r, 0.5 * float(np.min(gaps)))
    for bump in sys.impulse.bumps:
        gap = float(np.linalg.norm(Dhat.chart_delta(p, bump.center)))
        if gap >= bump.radius:
            r = min(r, gap - bump.radius)
    return r


def make_hyperbolic(sys, orbit, eps, attempts=10, seed=0, radius=HYPERBOLIZE_RADIUS):
    """Make a non-hyperbolic orbit hyperbolic with a linear bump.

    The bump is centred at points[0], so the orbit is preserved pointwise.
    The first attempt scales the derivative by 1 + η with η exhausting the
    budget. Further attempts use random matrices of norm η.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param orbit: periodic orbit
    :type orbit: impulsive.PeriodicOrbit
    :param eps: C1 budget
    :type eps: float
    :param attempts: number of attempts
    :type attempts: int
    :param seed: random seed of the retry draws
    :type seed: int
    :param radius: maximum bump radius
    :type radius: float
    :returns: perturbed impulse and hyperbolic orbit
    :rtype: tuple
    :raises: HyperbolizationFailed, BudgetExceeded
    """
    if orbit.tag == ORBIT_TAG.HYPERBOLIC:
        return sys.impulse, orbit

    k = sys.Dhat.chart_dim()
    L = impulse_lipschitz(sys.impulse)
    eta = min(eps / (K_BETA * L) * (1 - 1e-9), 0.5 / K_BETA)
    r = _support_radius(sys, orbit, radius)
    if r <= 0:
        raise HyperbolizationFailed(f"No room for a bump at {orbit.points[0].tolist()}.")

    rng = np.random.default_rng(seed)
    E = eta * np.eye(k)
    for attempt in range(attempts):
        if attempt > 0:
            E = rng.standard_normal((k, k))
            E *= eta / np.linalg.norm(E, 2)
        J = bump_linear(sys.impulse, orbit.points[0], E, r, eps)
        try:
            new = find_periodic(sys.with_impulse(J), orbit.points[0], orbit.N)
        except AnalysisError as e:
            logging.debug(f"Periodic: Hyperbolization attempt {attempt + 1} failed: {e}")
            continue
        if new.tag == ORBIT_TAG.HYPERBOLIC:
            logging.info(f"Periodic: Orbit hyperbolic after {attempt + 1} attempt(s) with η={eta:.4g}.")
            return J, new
    raise HyperbolizationFailed(f"Orbit not hyperbolic after {attempts} attempts with η={eta:.4g}.")


def minimal_orbit(orbit, tol=NEWTON_TOL, section=None):
    """Reduce an orbit repeating a shorter cycle to that cycle.

    Periodic chart axes of section are compared modulo 2π.
    """
    N = orbit.N
    for d in range(1, N):
        if N % d: continue
        a, b = orbit.points[d:], orbit.points[:-d]
        deltas = a - b if section is None else section.chart_delta(a, b)
        if np.max(np.abs(deltas)) < 10 * tol:
            return PeriodicOrbit(orbit.points[:d].copy(), orbit.flight_times[:d].copy(), orbit.jacobians[:d].copy(), orbit.tag)
    return orbit


def same_orbit(a, b, tol, section=None):
    """Return True if the point sets of two orbits match under cyclic alignment."""
    if a.N != b.N:
        return False
    for shift in range(b.N):
        other = b.rebase(shift).points
        delta = section.chart_delta(a.points, other) if section is not None else a.points - other
        if np.max(np.abs(delta)) < tol:
            return True
    return False


def audit_kupka_smale(sys, n_max, eps_bd=None, seeds=None, grid_res=8, tol=NEWTON_TOL, max_returns=None):
    """Audit all periodic orbits up to a period bound for hyperbolicity.

    Runs find_periodic for N = 1..⌊n_max/τ₀⌋ from all seeds, with τ₀ the
    minimum flight time. Orbits are reduced to their minimal period and
    deduplicated. Orbits with a point closer than eps_bd to the boundary are
    ignored.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param n_max: period bound
    :type n_max: float
    :param eps_bd: boundary margin (default: section margin)
    :type eps_bd: float
    :param seeds: landing chart seeds (default: grid cell centres)
    :param grid_res: cells per axis of the default seed grid
    :type grid_res: int
    :param tol: Newton tolerance
    :type tol: float
    :param max_returns: optional cap of the return count
    :type max_returns: int
    :rtype: impulsive.periodic.AuditReport
    """
    Dhat = sys.Dhat
    eps_bd = Dhat.boundary_margin if eps_bd is None else eps_bd
    seeds = Dhat.grid(grid_res) if seeds is None else np.atleast_2d(np.asarray(seeds, dtype=float))
    tau0 = min_flight_time(sys)
    n_returns = max(1, math.floor(n_max / tau0)) if tau0 > 0 else 1
    if max_returns is not None:
        n_returns = min(n_returns, max_returns)

    orbits = []
    for N in range(1, n_returns + 1):
        for s in seeds:
            try:
                orbit = find_periodic(sys, s, N, tol)
            except AnalysisError:
                continue
            orbit = minimal_orbit(orbit, tol, Dhat)
            if orbit.period > n_max + tol:
                continue
            if any(Dhat.boundary_distance(p) < eps_bd for p in orbit.points):
                continue
            if not any(same_orbit(orbit, o, 10 * tol, Dhat) for o in orbits):
                orbits.append(orbit)

    report = AuditReport(orbits, n_max, n_returns, eps_bd)
    logging.info(f"Periodic: Audit up to period {n_max} found {len(orbits)} orbit(s), verdict {report.verdict}.")
    return report
