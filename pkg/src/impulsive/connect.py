"""Module providing the closing engine.

Chain recurrence is turned into genuine periodic orbits by composing the
impulse with translate bumps of disjoint supports, each moving the landing
point of one return onto the next point of a pseudo-orbit. Successes are
always verified by direct simulation of the perturbed system.
"""

import collections
import logging

import networkx as nx
import numpy as np

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from .chains import build_graph, chain_reaches, chain_recurrent_cells
from .common import (AnalysisError, BudgetExceeded, ClosingFailure, NotFound, SupportOutsideChart, check_param)
from .impulse import bump_translate, c1_distance, impulse_lipschitz, translate_ratio
from .periodic import ORBIT_TAG, audit_kupka_smale, find_periodic, make_hyperbolic, trace_orbit
from .semiflow import poincare


# Maximum number of returns followed when looking for recurrence.
MAX_RECURRENCE = 400
# Maximum number of recurrence candidates built per jump size.
MAX_CANDIDATES = 5
# Maximum number of candidate paths inspected per pseudo-orbit search.
MAX_PATHS = 50
# Distance below which a landing point counts as the target.
CLOSING_TOL = 1e-8
# Slack allowed for sampled C1 distances over the analytic bound.
C1_SLACK = 0.05


@dataclass
class ClosingPlan:
    """Bookkeeping of a closing attempt.

    jumps holds one record (index, gap vector, bump centre, bump radius) per
    bump. The supports of all bumps are pairwise disjoint balls.
    """

    pseudo_orbit: list
    jumps: list = dc_field(default_factory=list)
    budget: float = 0.0
    feasible: bool = False
    reason: str = None

    def to_record(self):
        """Return the plan as JSON compatible dictionary."""
        return {
            'pseudo_orbit': [np.asarray(z).tolist() for z in self.pseudo_orbit],
            'jumps': [{'index': j[0], 'gap': np.asarray(j[1]).tolist(), 'center': np.asarray(j[2]).tolist(), 'radius': j[3]}
                      for j in self.jumps],
            'budget': self.budget, 'feasible': self.feasible, 'reason': self.reason}


@dataclass
class ClosingResult:
    """Perturbed impulse connecting x to y after a number of returns."""

    impulse: object
    plan: ClosingPlan
    returns: int
    delta: float

    def to_record(self):
        return {'returns': self.returns, 'delta': self.delta, 'bump_count': len(self.plan.jumps),
                'plan': self.plan.to_record(), 'impulse': self.impulse.to_config()}


def _separated(points, separation, section):
    for a, b in zip(points[1:], points[2:]):
        if np.linalg.norm(section.chart_delta(b, a)) < separation:
            return False
    return True


def _candidate_paths(G, a, b):
    """Yield candidate cell paths from a to b, shortest first."""
    try:
        if a != b:
            yield from nx.shortest_simple_paths(G, a, b)
            return
        if G.has_edge(a, a):
            yield [a, a]
        cycles = []
        for s in sorted(G.successors(a)):
            if s == a: continue
            try:
                cycles.append([a] + nx.shortest_path(G, s, a))
            except nx.NetworkXNoPath:
                pass
        yield from sorted(cycles, key=len)
    except nx.NetworkXNoPath:
        return


def find_pseudo_orbit(graph, a, b, separation=0.0, max_paths=MAX_PATHS):
    """Find a δ-pseudo-orbit from cell a to cell b.

    Returns the centres of the cells along the shortest path whose
    consecutive jump locations are at least separation apart.

    :param graph: pseudo-orbit graph
    :type graph: impulsive.PseudoOrbitGraph
    :param a: start cell
    :type a: int
    :param b: end cell
    :type b: int
    :param separation: minimum chart distance of consecutive jumps
    :type separation: float
    :param max_paths: number of candidate paths inspected
    :type max_paths: int
    :rtype: list of numpy.ndarray
    :raises: NotFound
    """
    section = graph.grid.section
    for i, path in enumerate(_candidate_paths(graph.graph, a, b)):
        if i >= max_paths:
            break
        points = [graph.grid.center(c) for c in path]
        if _separated(points, separation, section):
            return points
    raise NotFound(f"No pseudo-orbit from cell {a} to cell {b} with separation {separation} at δ={graph.delta}.")


def _supports_disjoint(plan, landings, section):
    """Check bump supports against each other and against foreign landing points."""
    for i, (ki, _, ci, ri) in enumerate(plan.jumps):
        for kj, _, cj, rj in plan.jumps[i + 1:]:
            if np.linalg.norm(section.chart_delta(ci, cj)) < ri + rj:
                return False
        for k, p in enumerate(landings):
            if k == ki: continue
            if np.linalg.norm(section.chart_delta(p, ci)) < ri:
                return False
    return True


def _orbit(sys, x, n):
    """Return the n landing points following x."""
    points = []
    v = x
    for _ in range(n):
        v, _ = poincare(sys, v)
        points.append(v)
    return points


def _verify(sys, J, x, y, n, tol):
    """Check by simulation that the n-th return of x under J lands on y."""
    try:
        landings = _orbit(sys.with_impulse(J), x, n)
    except AnalysisError as e:
        logging.debug(f"Connect: Verification run failed: {e}")
        return None
    if np.linalg.norm(sys.Dhat.chart_delta(landings[-1], y)) > tol:
        return None
    return landings


def _spread_fits(Dhat, centers, r):
    """Return True if balls of radius r around the centres are disjoint and inside the chart."""
    if Dhat.periodic and r >= np.pi:
        return False
    if any(Dhat.boundary_distance(c) < r for c in centers):
        return False
    if len(centers) < 2:
        return True
    dist = np.linalg.norm(Dhat.chart_delta(centers[:, None, :], centers[None, :, :]), axis=2)
    np.fill_diagonal(dist, np.inf)
    return bool(np.min(dist) >= 2 * r)


def _recurrence_candidates(sys, x, y, eps, delta, lam, tol):
    """Yield return counts n whose gap to y can be spread over n jumps of size ≤ δ.

    The n-th return P^n(x) misses y by g. Jumps of g/n at every return give
    bump centres P^k(x) + (k − 1)·g/n. Candidates whose predicted supports
    overlap or leave the chart are skipped.

    :returns: tuples (n, g)
    """
    Dhat = sys.Dhat
    ratio = None
    if eps > 0:
        ratio = translate_ratio(impulse_lipschitz(sys.impulse), eps) if lam is None else lam
    landings = []
    v = x
    for n in range(1, MAX_RECURRENCE + 1):
        try:
            v, _ = poincare(sys, v)
        except AnalysisError:
            return
        landings.append(v)
        gap = Dhat.chart_delta(y, v)
        dist = float(np.linalg.norm(gap))
        if dist > n * delta:
            continue
        if dist <= tol or eps <= 0:
            yield n, gap
            continue
        step = gap / n
        centers = np.array(landings) + np.arange(n)[:, None] * step[None, :]
        if _spread_fits(Dhat, centers, ratio * dist / n):
            yield n, gap


def _spread(sys, x, y, n, gap, eps, delta, lam):
    """Connect x to y after n returns with n equal jumps along the orbit."""
    Dhat = sys.Dhat
    L0 = impulse_lipschitz(sys.impulse)
    step = gap / n
    plan = ClosingPlan([x], budget=eps)
    J = sys.impulse
    current = x
    landings = []
    for k in range(1, n + 1):
        image, _ = poincare(sys, current)
        target = y if k == n else Dhat.normalize(image + step)
        jump = Dhat.chart_delta(target, image)
        if np.linalg.norm(jump) > delta * (1 + 1e-6):
            raise NotFound(f"Jump {np.linalg.norm(jump):.4g} at return {k} of {n} exceeds δ={delta}.")
        before = J
        J = bump_translate(J, image, target, eps, lam, lipschitz=L0)
        if J is not before:
            bump = J.bumps[-1]
            plan.jumps.append((k - 1, jump, np.asarray(bump.center), bump.radius))
        landings.append(target)
        plan.pseudo_orbit.append(target)
        current = target
    if not _supports_disjoint(plan, landings, Dhat):
        raise SupportOutsideChart("Bump supports of the closing plan intersect.")
    return J, plan, n


def _close_by_recurrence(sys, x, y, eps, delta, lam, tol):
    """Close along the unperturbed orbit of x, spreading the final gap over its returns.

    Returns None if no return count up to MAX_RECURRENCE qualifies. At most
    MAX_CANDIDATES qualifying counts are built; the error of the last one
    is raised if none of them can be built.
    """
    error = None
    for i, (n, gap) in enumerate(_recurrence_candidates(sys, x, y, eps, delta, lam, tol)):
        if i >= MAX_CANDIDATES:
            break
        if np.linalg.norm(gap) <= tol:
            return sys.impulse, ClosingPlan([x, y], budget=eps), n
        if eps <= 0:
            raise BudgetExceeded(f"A gap of {np.linalg.norm(gap):.4g} after {n} return(s) does not fit into the budget {eps}.")
        try:
            return _spread(sys, x, y, n, gap, eps, delta, lam)
        except (BudgetExceeded, SupportOutsideChart, NotFound) as e:
            logging.debug(f"Connect: Spreading over {n} return(s) failed: {e}")
            error = e
    if error is not None:
        raise error
    return None


def _close_by_graph(sys, x, y, eps, delta, h, lam, separation, threads, tol):
    """Close along a graph pseudo-orbit, jumping only where the orbit leaves the next cell."""
    Dhat = sys.Dhat
    graph = build_graph(sys, h, delta, threads)
    a, b = graph.grid.cell_of(x), graph.grid.cell_of(y)
    if a is None or b is None or not chain_reaches(graph, a, b):
        raise NotFound(f"Cell of {np.asarray(y).tolist()} is no chain iterate of the cell of {np.asarray(x).tolist()} at δ={delta}.")
    points = find_pseudo_orbit(graph, a, b, separation)
    points = [np.asarray(x, dtype=float)] + points[1:-1] + [np.asarray(y, dtype=float)]
    n = len(points) - 1
    L0 = impulse_lipschitz(sys.impulse)

    plan = ClosingPlan(points, budget=eps)
    J = sys.impulse
    current = points[0]
    landings = []
    for k in range(1, n + 1):
        image, _ = poincare(sys.with_impulse(J), current)
        target = points[k]
        stay = k < n and graph.grid.cell_of(image) == graph.grid.cell_of(target)
        if stay or np.linalg.norm(Dhat.chart_delta(target, image)) <= tol:
            landings.append(image)
            current = image
            continue
        J = bump_translate(J, image, target, eps, lam, lipschitz=L0)
        bump = J.bumps[-1]
        plan.jumps.append((k - 1, Dhat.chart_delta(target, image), np.asarray(bump.center), bump.radius))
        landings.append(target)
        current = target
    if not _supports_disjoint(plan, landings, Dhat):
        raise SupportOutsideChart("Bump supports of the closing plan intersect.")
    return J, plan, n


def close_orbit(sys, x, y, eps, delta0, max_halvings=4, h=None, lam=None, separation=0.0, threads=None, tol=CLOSING_TOL):
    """Perturb the impulse so that the orbit of x passes through y.

    For δ = delta0, delta0/2, ... the engine first follows the orbit of x
    to a return P^n(x) within n·δ of y and spreads the gap over n jumps of
    equal size. It then tries a graph pseudo-orbit at grid resolution h
    (default δ). Every bump gets the full budget eps, since bumps with
    disjoint supports cost the maximum of their bounds. The first plan
    verified by simulation whose C1 distance stays within eps wins.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param x: landing chart point
    :param y: landing chart point
    :param eps: C1 budget
    :type eps: float
    :param delta0: initial jump size
    :type delta0: float
    :param max_halvings: number of halvings of δ
    :type max_halvings: int
    :param h: grid resolution (default: δ)
    :type h: float
    :param lam: ratio of bump radius and jump length (default: automatic)
    :type lam: float
    :param separation: minimum distance of consecutive jumps
    :type separation: float
    :param threads: maximum number of graph worker threads
    :type threads: int
    :param tol: verification tolerance
    :type tol: float
    :rtype: impulsive.connect.ClosingResult
    :raises: ClosingFailure
    """
    check_param('eps', eps, is_num=True, ge=0)
    check_param('delta0', delta0, is_num=True, gr=0)
    check_param('max_halvings', max_halvings, is_int=True, ge=0)
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    reason = "chain"
    plan = None
    delta = delta0
    for _ in range(max_halvings + 1):
        for attempt in ("recurrence", "graph"):
            try:
                if attempt == "recurrence":
                    result = _close_by_recurrence(sys, x, y, eps, delta, lam, tol)
                    if result is None: continue
                else:
                    result = _close_by_graph(sys, x, y, eps, delta, delta if h is None else h, lam, separation, threads, tol)
            except BudgetExceeded as e:
                reason = "budget"
                logging.debug(f"Connect: {attempt} at δ={delta}: {e}")
                continue
            except SupportOutsideChart as e:
                reason = "supports"
                logging.debug(f"Connect: {attempt} at δ={delta}: {e}")
                continue
            except AnalysisError as e:
                logging.debug(f"Connect: {attempt} at δ={delta}: {e}")
                continue
            J, plan, n = result
            cost = c1_distance(sys.impulse, J) if J.bumps != sys.impulse.bumps else 0.0
            if cost > eps * (1 + 1e-9):
                reason = "budget"
                logging.debug(f"Connect: {attempt} at δ={delta}: C1 distance {cost:.4g} > {eps}.")
                continue
            if _verify(sys, J, x, y, n, tol) is None:
                reason = "verification"
                continue
            plan.feasible = True
            logging.info(f"Connect: Closed after {n} return(s) with {len(plan.jumps)} bump(s) at δ={delta} ({attempt}).")
            return ClosingResult(J, plan, n, delta)
        delta /= 2
    raise ClosingFailure(f"Closing from {x.tolist()} to {y.tolist()} failed after {max_halvings} halvings ({reason}).", reason, plan)


def _orbit_near(orbit, q, radius, section):
    return bool(np.min(np.linalg.norm(section.chart_delta(orbit.points, q), axis=1)) <= radius)


def close_to_periodic(sys, q, eps, h=0.01, delta=0.01, split=0.5, max_halvings=4, seed=0, threads=None):
    """Find a hyperbolic periodic orbit through a point near q.

    Returns an existing hyperbolic orbit near q with the unperturbed impulse
    if there is one. Otherwise the orbit of q is closed with budget
    split·eps and hyperbolized with the remaining budget.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param q: landing chart point of a chain-recurrent cell
    :param eps: C1 budget
    :type eps: float
    :param h: grid resolution
    :type h: float
    :param delta: initial jump size
    :type delta: float
    :param split: fraction of the budget used for closing
    :type split: float
    :param seed: random seed of the hyperbolization retries
    :type seed: int
    :returns: perturbed impulse and hyperbolic orbit
    :rtype: tuple
    :raises: ClosingFailure, NotFound, HyperbolizationFailed
    """
    check_param('split', split, is_num=True, gr=0, lo=1)
    Dhat = sys.Dhat
    q = np.asarray(q, dtype=float).reshape(-1)
    radius = h + delta

    # Existing hyperbolic orbit.
    try:
        orbit = find_periodic(sys, q, 1)
        if orbit.tag == ORBIT_TAG.HYPERBOLIC and _orbit_near(orbit, q, radius, Dhat):
            return sys.impulse, orbit
    except AnalysisError:
        pass

    closing = close_orbit(sys, q, q, split * eps, delta, max_halvings, h, threads=threads)
    sysJ = sys.with_impulse(closing.impulse)
    orbit = trace_orbit(sysJ, q, closing.returns, CLOSING_TOL)
    J, orbit = make_hyperbolic(sysJ, orbit, (1 - split) * eps, seed=seed)
    if not _orbit_near(orbit, q, radius, Dhat):
        raise NotFound(f"Periodic orbit misses the ({radius:.3g})-neighbourhood of {q.tolist()}.")
    cost = c1_distance(sys.impulse, J) if J.bumps != sys.impulse.bumps else 0.0
    if cost > eps * (1 + 1e-9):
        raise ClosingFailure(f"Closing and hyperbolization cost {cost:.4g} > {eps}.", "budget")

    # Direct simulation of the final system.
    if _verify(sys, J, orbit.points[0], orbit.points[0], orbit.N, CLOSING_TOL) is None:
        raise ClosingFailure(f"Periodic orbit through {q.tolist()} not reproduced by simulation.", "verification")
    return J, orbit


@dataclass
class DensityReport:
    """Result of the density experiment."""

    eps: float
    h: float
    delta: float
    rows: list
    audit: dict = None

    @property
    def successes(self):
        return sum(1 for r in self.rows if r['status'] == "success")

    @property
    def fraction(self):
        """Return the fraction of chain-recurrent cells closed successfully."""
        return self.successes / len(self.rows) if self.rows else None

    @property
    def taxonomy(self):
        """Return the number of cells per status."""
        return dict(sorted(collections.Counter(r['status'] for r in self.rows).items()))

    def to_record(self):
        return {'eps': self.eps, 'h': self.h, 'delta': self.delta, 'cell_count': len(self.rows),
                'successes': self.successes, 'fraction': self.fraction, 'taxonomy': self.taxonomy,
                'audit': self.audit}


def _density_cell(sys, graph, cid, eps, h, delta, seed, resample):
    row = {'cell_id': cid, 'status': None, 'bump_count': 0, 'c1_cost': None, 'orbit_period': None, 'multipliers': None}
    q = graph.grid.center(cid)
    try:
        J, orbit = close_to_periodic(sys, q, eps, h, delta, seed=seed + cid)
    except ClosingFailure as e:
        row['status'] = f"closing_{e.reason}"
        return row
    except AnalysisError as e:
        row['status'] = type(e).__name__
        return row
    cost = c1_distance(sys.impulse, J)
    row.update({'bump_count': len(J.bumps), 'c1_cost': cost, 'orbit_period': orbit.period,
                'multipliers': [[float(m.real), float(m.imag)] for m in orbit.multipliers]})
    if resample and J.bumps and c1_distance(sys.impulse, J, method="sampled") > (1 + C1_SLACK) * eps:
        row['status'] = "budget_sampled"
    elif cost > eps * (1 + 1e-9):
        row['status'] = "budget"
    elif orbit.tag != ORBIT_TAG.HYPERBOLIC:
        row['status'] = "non_hyperbolic"
    else:
        row['status'] = "success"
    return row


def density_experiment(sys, eps, h, delta, max_cells=None, seed=0, threads=None, resample=True, audit_n_max=None):
    """Close every chain-recurrent cell to a nearby hyperbolic periodic orbit.

    :param sys: impulsive system
    :type sys: impulsive.ImpulsiveSystem
    :param eps: C1 budget
    :type eps: float
    :param h: grid resolution
    :type h: float
    :param delta: jump size
    :type delta: float
    :param max_cells: optional cap of the number of cells (seeded sample)
    :type max_cells: int
    :param seed: random seed
    :type seed: int
    :param threads: maximum number of worker threads
    :type threads: int
    :param resample: True to re-check C1 costs by grid sampling
    :type resample: bool
    :param audit_n_max: optional period bound of a preceding hyperbolicity audit
    :type audit_n_max: float
    :rtype: impulsive.connect.DensityReport
    """
    report_audit = None
    if audit_n_max is not None:
        audit = audit_kupka_smale(sys, audit_n_max)
        report_audit = audit.to_record()
        if not audit.verdict:
            logging.warning(f"Connect: {len(audit.orbits)} periodic orbit(s) up to period {audit_n_max} include non-hyperbolic ones.")

    graph = build_graph(sys, h, delta, threads)
    cells = chain_recurrent_cells(graph)
    if max_cells is not None and len(cells) > max_cells:
        rng = np.random.default_rng(seed)
        cells = sorted(int(c) for c in rng.choice(cells, size=max_cells, replace=False))

    with ThreadPoolExecutor(max_workers=threads) as executor:
        rows = list(executor.map(lambda c: _density_cell(sys, graph, c, eps, h, delta, seed, resample), cells))

    report = DensityReport(eps, h, delta, rows, report_audit)
    fraction = report.fraction
    logging.info(f"Connect: Density experiment closed {report.successes} of {len(rows)} cells"
                 + (f" (fraction {fraction:.3f})." if fraction is not None else "."))
    return report
