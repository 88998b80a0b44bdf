"""Module providing flow integration and variational equations.

Flows are integrated with the classical fourth-order Runge-Kutta scheme at a
fixed base step. A pass at twice the step predicts the endpoint change of
halving the step. If it exceeds the tolerance, one pass at half the step is
run and returned, with a warning if it still differs by more than the
tolerance. Exact field kinds use their closed-form flows.
"""

import logging
import math

import numpy as np

from dataclasses import asdict, dataclass, field as dc_field

from .common import ConfigError, DomainError, StepError, check_param, check_valid_required


@dataclass(frozen=True)
class IntegratorOpts:
    """Integrator and event detection options."""

    step: float = 1e-3
    tol: float = 1e-9
    t_max: float = 1e3
    time_tol: float = 1e-12
    bisect_iter: int = 60
    grazing_guard: float = 1e-6
    stall_speed: float = 1e-10
    event_tol: float = 1e-9

    CONF_VALID_KEYS = {'step', 'tol', 't_max', 'time_tol', 'bisect_iter', 'grazing_guard', 'stall_speed', 'event_tol'}

    @classmethod
    def from_config(cls, config=None, defaults=None):
        """Create options from a configuration dictionary.

        :param config: option values
        :type config: dict
        :param defaults: options providing values missing in config
        :type defaults: impulsive.IntegratorOpts
        :rtype: impulsive.IntegratorOpts
        :raises: ConfigError
        """
        config = {} if config is None else config
        check_valid_required(config, cls.CONF_VALID_KEYS, set())
        # Check parameters.
        for key in ('step', 'tol', 't_max', 'time_tol', 'grazing_guard', 'stall_speed', 'event_tol'):
            check_param(key, config, required=False, is_num=True, gr=0)
        check_param('bisect_iter', config, required=False, is_int=True, ge=1)
        values = asdict(defaults) if defaults is not None else {}
        values.update(config)
        return cls(**values)

    def to_config(self):
        """Return the options as dictionary."""
        return asdict(self)


@dataclass
class FlowResult:
    """Result of a flow integration.

    The path is a list of (time, point) tuples with strictly increasing times
    whose last entry is the endpoint.
    """

    endpoint: np.ndarray
    path: list = dc_field(default_factory=list)
    jacobian: np.ndarray = None


def eval_field(field, x):
    """Evaluate the vector field.

    :param field: vector field
    :type field: impulsive.fields.Field
    :param x: ambient point
    :type x: numpy.ndarray
    :returns: velocity X(x)
    :rtype: numpy.ndarray
    :raises: DomainError
    """
    x = np.asarray(x, dtype=float)
    if not field.in_domain(x):
        raise DomainError(f"Point {x.tolist()} lies outside the phase domain of the {field.kind.value} field.")
    return field.eval(x)


def rk4_step(rhs, z, h):
    """Advance z by one classical Runge-Kutta step of size h."""
    k1 = rhs(z)
    k2 = rhs(z + 0.5 * h * k1)
    k3 = rhs(z + 0.5 * h * k2)
    k4 = rhs(z + h * k3)
    return z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def state_rhs(field, with_jacobian):
    """Return the right-hand side of the (augmented) flow equation.

    With Jacobian, the state is x followed by the row-major entries of Dφ
    and the variational equation d/dt Dφ = DX(x)·Dφ is appended.
    """
    d = field.dim
    if not with_jacobian:
        return lambda z: field.eval(z)

    def rhs(z):
        x = z[:d]
        phi = z[d:].reshape(d, d)
        return np.concatenate([field.eval(x), (field.jacobian(x) @ phi).ravel()])
    return rhs


def initial_state(x, with_jacobian):
    """Return the initial (augmented) state."""
    x = np.asarray(x, dtype=float)
    if not with_jacobian:
        return x.copy()
    return np.concatenate([x, np.eye(len(x)).ravel()])


def check_state(field, z):
    """Check an integrated state for finiteness and domain membership.

    :raises: StepError, DomainError
    """
    if not np.all(np.isfinite(z)):
        raise StepError(f"Integration step produced a non-finite state for the {field.kind.value} field.")
    x = z[:field.dim]
    if not field.in_domain(x):
        raise DomainError(f"Trajectory left the phase domain of the {field.kind.value} field at {x.tolist()}.")


def _integrate(field, x, t, step, with_jacobian):
    """Integrate with a fixed step dividing t evenly."""
    n = max(1, math.ceil(abs(t) / step - 1e-9))
    h = t / n
    rhs = state_rhs(field, with_jacobian)
    z = initial_state(x, with_jacobian)
    path = [(0.0, z[:field.dim].copy())]
    for i in range(1, n + 1):
        z = rk4_step(rhs, z, h)
        check_state(field, z)
        path.append((i * h, z[:field.dim].copy()))
    return z, path


def _flow(field, x, t, opts, with_jacobian):
    opts = IntegratorOpts() if opts is None else opts
    x = np.asarray(x, dtype=float)
    eval_field(field, x)

    # Identity for zero duration.
    if t == 0:
        return FlowResult(x.copy(), [(0.0, x.copy())], np.eye(field.dim) if with_jacobian else None)

    # Closed-form flows.
    if field.exact:
        endpoint, path, jac = field.exact_flow(x, t, jacobian=with_jacobian)
        return FlowResult(endpoint, path, jac)

    d = field.dim
    z, path = _integrate(field, x, t, opts.step, with_jacobian)
    # Change expected from halving the step (fourth order).
    try:
        rough, _ = _integrate(field, x, t, 2 * opts.step, with_jacobian)
        predicted = np.max(np.abs(z[:d] - rough[:d])) / 16
    except (DomainError, StepError):
        predicted = math.inf
    if predicted > opts.tol:
        fine, path = _integrate(field, x, t, opts.step / 2, with_jacobian)
        diff = np.max(np.abs(fine[:d] - z[:d]))
        if diff > opts.tol:
            logging.warning(f"Flow: Endpoint changed by {diff:.3e} > {opts.tol:.1e} when halving the step {opts.step}.")
        z = fine
    jac = z[d:].reshape(d, d) if with_jacobian else None
    return FlowResult(z[:d].copy(), path, jac)


def flow(field, x, t, opts=None):
    """Integrate the flow φ_t(x).

    Negative durations are permitted for the flow itself (not for the
    impulsive semiflow). In that case the path is listed in order of
    integration with decreasing times.

    :param field: vector field
    :type field: impulsive.fields.Field
    :param x: ambient point
    :type x: numpy.ndarray
    :param t: duration
    :type t: float
    :param opts: integrator options
    :type opts: impulsive.IntegratorOpts
    :rtype: impulsive.FlowResult
    :raises: DomainError, StepError
    """
    return _flow(field, x, t, opts, False)


def flow_with_jacobian(field, x, t, opts=None):
    """Integrate the flow together with its derivative Dφ_t(x).

    The derivative solves the variational equation d/dt Dφ_t = DX(φ_t)·Dφ_t
    with Dφ_0 = Id. Exact kinds return their closed-form derivative.

    :param field: vector field
    :type field: impulsive.fields.Field
    :param x: ambient point
    :type x: numpy.ndarray
    :param t: duration
    :type t: float
    :param opts: integrator options
    :type opts: impulsive.IntegratorOpts
    :rtype: impulsive.FlowResult
    :raises: DomainError, StepError
    """
    return _flow(field, x, t, opts, True)
