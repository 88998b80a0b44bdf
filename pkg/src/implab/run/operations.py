"""Module providing the scenario operations.

Every operation receives the impulsive system, the scenario and the run
context and returns the data files to be written together with a short
summary. Operations only compute; writing is left to the runner.
"""

import logging

from dataclasses import dataclass, field as dc_field

import numpy as np

from impulsive import (AnalysisError, ClosingFailure, ConfigError, audit_kupka_smale, build_graph, c1_distance,
                       chain_recurrent_cells, check_param, close_orbit, close_to_periodic, density_experiment,
                       discontinuity_report, find_periodic, min_flight_time, omega_estimate, poincare, trajectory)
from impulsive.common import NotFound
from impulsive.periodic import minimal_orbit, same_orbit


@dataclass
class RunContext:
    """Settings of a single run."""

    threads: int = None
    emit_plot_data: bool = False
    seed: int = 0


@dataclass
class DataFile:
    """Data file produced by an operation.

    kind is "csv" (payload: (header, rows)), "json" (payload: record) or
    "jsonl" (payload: list of records).
    """

    name: str
    kind: str
    payload: object


@dataclass
class OpResult:
    """Result of an operation."""

    files: list = dc_field(default_factory=list)
    summary: dict = dc_field(default_factory=dict)
    failed: bool = False


def _point(options, key, dim, default=None):
    """Return a point given as list of numbers in the options."""
    value = options.get(key, default)
    if value is None:
        raise ConfigError(f"No value for required parameter '{key}' specified.", options)
    check_param(key, value, is_list=True, length=dim)
    check_param(key, value, recurse=True, is_num=True)
    return np.array(value, dtype=float)


def _center(section):
    return (section.lo + section.hi) / 2


def _columns(prefix, n):
    return [f"{prefix}{i + 1}" for i in range(n)]


def simulate(sys, scenario, ctx):
    """Compute the impulsive trajectory of a point up to time T."""
    options = scenario.options
    spec = scenario.example
    d = sys.field.dim
    x = _point(options, 'x', d, spec.start if spec is not None else None)
    T = options.get('T', spec.horizon if spec is not None else None)
    check_param('T', T, is_num=True, ge=0)

    traj = trajectory(sys, x, T)
    k = sys.D.chart_dim()
    result = OpResult(summary={'T': T, 'jumps': len(traj.jumps), 'endpoint': sys.field.reduce(traj.endpoint)})
    result.files.append(DataFile("trajectory.csv", "csv", (['t'] + _columns('x', d) + ['jump'], traj.rows(sys.field))))
    result.files.append(DataFile("jumps.csv", "csv", (['n', 'tau'] + _columns('pre', k) + _columns('post', k), traj.jump_rows())))
    if ctx.emit_plot_data:
        rows = [[i, t] + sys.field.reduce(p).tolist() for i, arc in enumerate(traj.arcs) for t, p in arc.path]
        result.files.append(DataFile("plot_trajectory.csv", "csv", (['arc', 't'] + _columns('x', d), rows)))
    return result


def hitmap(sys, scenario, ctx):
    """Classify the landing cells by their return behaviour."""
    options = scenario.options
    check_param('grid_res', options, required=False, is_int=True, ge=1)
    report = discontinuity_report(sys, options.get('grid_res', 32))
    rows = [[i] + u + [status] for i, (u, status) in enumerate(report['cells'])]
    result = OpResult(summary=dict(report['counts']))
    result.files.append(DataFile("hitmap.csv", "csv", (['cell'] + _columns('u', sys.Dhat.chart_dim()) + ['status'], rows)))
    return result


def poincare_iterates(sys, scenario, ctx):
    """Iterate the Poincaré map from a landing chart point."""
    options = scenario.options
    k = sys.Dhat.chart_dim()
    v = _point(options, 'v', k, _center(sys.Dhat).tolist())
    check_param('n', options, required=False, is_int=True, ge=1)
    n = options.get('n', 10)

    rows = [[0] + v.tolist() + [0.0]]
    result = OpResult(summary={'iterates': n})
    for i in range(1, n + 1):
        try:
            v, tau = poincare(sys, v)
        except AnalysisError as e:
            logging.warning(f"Operation: Poincaré iteration stopped at step {i}. {e}")
            result.summary['stopped'] = type(e).__name__
            result.summary['iterates'] = i - 1
            break
        rows.append([i] + np.asarray(v).tolist() + [tau])
    result.files.append(DataFile("poincare.csv", "csv", (['k'] + _columns('u', k) + ['tau'], rows)))
    return result


def periodic(sys, scenario, ctx):
    """Solve for periodic orbits from a list of seeds."""
    options = scenario.options
    k = sys.Dhat.chart_dim()
    check_param('N', options, required=False, is_int=True, ge=1)
    check_param('tol', options, required=False, is_num=True, gr=0)
    check_param('grid_res', options, required=False, is_int=True, ge=1)
    N = options.get('N', 1)
    if 'seeds' in options:
        check_param('seeds', options, is_list=True)
        seeds = [_point({'seed': s}, 'seed', k) for s in options['seeds']]
    else:
        seeds = list(sys.Dhat.grid(options.get('grid_res', 4)))

    kwargs = {'tol': options['tol']} if 'tol' in options else {}
    orbits = []
    for s in seeds:
        try:
            orbit = minimal_orbit(find_periodic(sys, s, N, **kwargs), section=sys.Dhat)
        except AnalysisError as e:
            logging.debug(f"Operation: No periodic orbit from seed {np.asarray(s).tolist()}. {e}")
            continue
        if not any(same_orbit(orbit, o, 1e-7, sys.Dhat) for o in orbits):
            orbits.append(orbit)
    if not orbits:
        raise NotFound(f"No periodic orbit with {N} return(s) found from {len(seeds)} seed(s).")

    result = OpResult(summary={'orbits': len(orbits), 'tags': [o.tag.value for o in orbits],
                               'periods': [o.period for o in orbits]})
    result.files.append(DataFile("orbits.jsonl", "jsonl", [o.to_record() for o in orbits]))
    return result


def audit(sys, scenario, ctx):
    """Audit the periodic orbits up to a period bound for hyperbolicity."""
    options = scenario.options
    check_param('n_max', options, is_num=True, gr=0)
    check_param('eps_bd', options, required=False, is_num=True, ge=0)
    check_param('grid_res', options, required=False, is_int=True, ge=1)
    check_param('max_returns', options, required=False, is_int=True, ge=1)
    report = audit_kupka_smale(sys, options['n_max'], options.get('eps_bd'), grid_res=options.get('grid_res', 8),
                               max_returns=options.get('max_returns'))
    record = report.to_record()
    result = OpResult(summary={'orbits': record['orbit_count'], 'tags': record['tags'], 'verdict': record['verdict']})
    result.files.append(DataFile("orbits.jsonl", "jsonl", [o.to_record() for o in report.orbits]))
    result.files.append(DataFile("audit.json", "json", record))
    return result


def chain(sys, scenario, ctx):
    """Build the pseudo-orbit graph and mark the chain-recurrent cells."""
    options = scenario.options
    check_param('h', options, is_num=True, gr=0)
    check_param('delta', options, is_num=True, ge=0)
    graph = build_graph(sys, options['h'], options['delta'], ctx.threads)
    recurrent = set(chain_recurrent_cells(graph))
    k = sys.Dhat.chart_dim()

    cells = [row + [int(row[0] in recurrent)] for row in graph.cell_rows()]
    result = OpResult(summary={'cells': graph.grid.size, 'edges': graph.graph.number_of_edges(), 'recurrent': len(recurrent)})
    result.files.append(DataFile("adjacency.csv", "csv", (['source', 'target'], graph.adjacency_rows())))
    result.files.append(DataFile("cells.csv", "csv", (['cell'] + _columns('lo', k) + _columns('hi', k) + ['status', 'recurrent'], cells)))
    if ctx.emit_plot_data:
        rows = []
        for cid in range(graph.grid.size):
            u = graph.grid.center(cid)
            rows.append(u.tolist() + sys.field.reduce(sys.Dhat.chart(u)).tolist() + [int(cid in recurrent)])
        header = _columns('u', k) + _columns('x', sys.field.dim) + ['recurrent']
        result.files.append(DataFile("plot_cells.csv", "csv", (header, rows)))
    return result


def omega(sys, scenario, ctx):
    """Compute the chain-recurrent cells across a sequence of scales."""
    options = scenario.options
    for key in ('h', 'delta'):
        check_param(key, options, is_list=True)
        check_param(key, options, recurse=True, is_num=True, gr=0)
    report = omega_estimate(sys, options['h'], options['delta'], ctx.threads)
    result = OpResult(summary={'nested': report.nested, 'cells': [len(s.cells) for s in report.scales]})
    result.files.append(DataFile("omega.json", "json", report.to_record()))
    return result


def _close_orbit(sys, options, ctx):
    k = sys.Dhat.chart_dim()
    x = _point(options, 'x', k)
    y = _point(options, 'y', k)
    check_param('eps', options, is_num=True, ge=0)
    check_param('delta0', options, is_num=True, gr=0)
    check_param('max_halvings', options, required=False, is_int=True, ge=0)
    check_param('h', options, required=False, is_num=True, gr=0)
    check_param('lam', options, required=False, is_num=True, gr=0)
    check_param('separation', options, required=False, is_num=True, ge=0)
    res = close_orbit(sys, x, y, options['eps'], options['delta0'], options.get('max_halvings', 4), options.get('h'),
                      options.get('lam'), options.get('separation', 0.0), ctx.threads)
    record = res.to_record()
    record['c1_distance'] = c1_distance(sys.impulse, res.impulse)
    return record


def _close_periodic(sys, options, ctx):
    q = _point(options, 'q', sys.Dhat.chart_dim(), _center(sys.Dhat).tolist())
    check_param('eps', options, is_num=True, gr=0)
    check_param('h', options, required=False, is_num=True, gr=0)
    check_param('delta', options, required=False, is_num=True, gr=0)
    check_param('split', options, required=False, is_num=True, gr=0, lo=1)
    check_param('max_halvings', options, required=False, is_int=True, ge=0)
    J, orbit = close_to_periodic(sys, q, options['eps'], options.get('h', 0.01), options.get('delta', 0.01),
                                 options.get('split', 0.5), options.get('max_halvings', 4), ctx.seed, ctx.threads)
    return {'impulse': J.to_config(), 'orbit': orbit.to_record(), 'bump_count': len(J.bumps),
            'c1_distance': c1_distance(sys.impulse, J)}


def close(sys, scenario, ctx):
    """Perturb the impulse to close an orbit (mode "orbit") or to create a
    hyperbolic periodic orbit near a point (mode "periodic")."""
    options = scenario.options
    mode = options.pop('mode', "orbit")
    check_param('mode', mode, is_str=True, options={"orbit", "periodic"})
    result = OpResult()
    try:
        record = _close_orbit(sys, options, ctx) if mode == "orbit" else _close_periodic(sys, options, ctx)
        record['status'] = "success"
    except ClosingFailure as e:
        record = {'status': "failure", 'reason': e.reason, 'message': str(e),
                  'plan': e.plan.to_record() if e.plan is not None else None}
        result.failed = True
    except AnalysisError as e:
        record = {'status': "failure", 'reason': type(e).__name__, 'message': str(e), 'plan': None}
        result.failed = True
    record['mode'] = mode
    result.summary = {'mode': mode, 'status': record['status']}
    if result.failed:
        result.summary['reason'] = record['reason']
        logging.warning(f"Operation: Closing failed ({record['reason']}). {record['message']}")
    else:
        result.summary['c1_distance'] = record['c1_distance']
    result.files.append(DataFile("closing.json", "json", record))
    return result


def density(sys, scenario, ctx):
    """Run the density experiment over the chain-recurrent cells."""
    options = scenario.options
    check_param('eps', options, is_num=True, gr=0)
    check_param('h', options, is_num=True, gr=0)
    check_param('delta', options, is_num=True, gr=0)
    check_param('max_cells', options, required=False, is_int=True, ge=1)
    check_param('resample', options, required=False, is_bool=True)
    check_param('audit_n_max', options, required=False, is_num=True, gr=0)
    report = density_experiment(sys, options['eps'], options['h'], options['delta'], options.get('max_cells'),
                                ctx.seed, ctx.threads, options.get('resample', True), options.get('audit_n_max'))
    record = report.to_record()
    result = OpResult(summary={'cells': record['cell_count'], 'fraction': record['fraction'], 'taxonomy': record['taxonomy']})
    result.files.append(DataFile("report.json", "json", record))
    result.files.append(DataFile("cells.jsonl", "jsonl", report.rows))
    return result


def validate(sys, scenario, ctx):
    """Report the validation of the impulse."""
    record = sys.validation.to_record()
    record['min_flight_time'] = min_flight_time(sys)
    result = OpResult(summary={'verdict': record['verdict'], 'hausdorff_gap': record['hausdorff_gap'],
                               'tau1_sup_bound': record['tau1_sup_bound']})
    result.files.append(DataFile("validation.json", "json", record))
    return result


# Dictionary used to map operation names to operations.
supported_operations = {
    'simulate': simulate,
    'hitmap': hitmap,
    'poincare': poincare_iterates,
    'periodic': periodic,
    'audit': audit,
    'chain': chain,
    'omega': omega,
    'close': close,
    'density': density,
    'validate': validate}
