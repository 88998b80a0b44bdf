"""Module providing cross-sections with explicit charts.

A cross-section is a codimension-one patch of the ambient space given by a
chart u ↦ x on an axis-aligned chart box, a partial inverse and an event
function g vanishing on the patch. Chart axes may be periodic (the box then
spans a full period and the section has no boundary along that axis).
"""

import copy
import math

import numpy as np

from abc import ABC, abstractmethod
from importlib import import_module

from .common import ChartError, ConfigError, SingularityError, check_param, check_valid_required, wrap_angle


# Default distance from the chart boundary below which hits are rejected.
DEFAULT_BOUNDARY_MARGIN = 1e-3
# Maximum event function value accepted by locate().
LOCATE_TOL = 1e-6
# Slack of chart box membership tests for computed hits.
CHART_SLACK = 1e-8

_TWO_PI = 2 * math.pi


class CrossSection(ABC):
    """Cross-section given by a chart.

    Abstract base class providing functionality common to all section types.
    """

    # Section type. Needs to be re-defined by implementing sub-class.
    TYPE = None
    # Required and valid configuration parameters specific to the section
    # type. Need to be re-defined by implementing sub-class.
    CONF_REQ_KEYS = set()
    CONF_VALID_KEYS = set()
    # Configuration parameters shared by all section types.
    COMMON_KEYS = {'type', 'lo', 'hi', 'boundary_margin', 'tau_axes'}

    def __init__(self, name, config):
        """Initialize the cross-section.

        :param name: section name (e.g. "D" or "Dhat")
        :type name: str
        :param config: section configuration
        :type config: dict
        :raises: ConfigError
        """
        self._name = name
        config = copy.deepcopy(config)
        config.setdefault('type', self.TYPE)
        check_valid_required(config, self.CONF_VALID_KEYS | self.COMMON_KEYS, self.CONF_REQ_KEYS | {'type'})
        self._check_config(config)

        # Chart box.
        box = self._default_box(config)
        if box is None:
            check_param('lo', config, is_list=True)
            check_param('hi', config, is_list=True)
            check_param('lo', config, recurse=True, is_num=True)
            check_param('hi', config, recurse=True, is_num=True)
            box = (config['lo'], config['hi'])
        self._lo = np.array(box[0], dtype=float)
        self._hi = np.array(box[1], dtype=float)
        if self._lo.shape != self._hi.shape or len(self._lo) != self.chart_dim():
            raise ConfigError(f"The chart box of section '{name}' must have dimension {self.chart_dim()}.", config)
        if not np.all(self._lo < self._hi):
            raise ConfigError(f"The chart box of section '{name}' must satisfy lo < hi.", config)

        # Boundary margin and axes measured by the τ₁ derivative.
        check_param('boundary_margin', config, required=False, is_num=True, ge=0)
        self._margin = float(config.get('boundary_margin', DEFAULT_BOUNDARY_MARGIN))
        axes = config.get('tau_axes', list(range(self.chart_dim())))
        check_param('tau_axes', axes, is_list=True)
        check_param('tau_axes', axes, recurse=True, is_int=True, ge=0, lo=self.chart_dim())
        self._tau_axes = tuple(axes)
        self._config = config

    def _check_config(self, config):
        """Check type specific configuration parameters."""
        pass

    def _default_box(self, config):
        """Return a fixed chart box or None if the box is configured."""
        return None

    @abstractmethod
    def chart_dim(self):
        """Return the number of chart coordinates."""
        pass

    @property
    def name(self):
        """Return the section name."""
        return self._name

    @property
    def lo(self):
        """Return the lower corner of the chart box."""
        return self._lo.copy()

    @property
    def hi(self):
        """Return the upper corner of the chart box."""
        return self._hi.copy()

    @property
    def periodic(self):
        """Return the periodic chart axes."""
        return ()

    @property
    def boundary_margin(self):
        """Return the boundary margin in chart units."""
        return self._margin

    @property
    def tau_axes(self):
        """Return the chart axes along which τ₁ derivatives are measured."""
        return self._tau_axes

    @abstractmethod
    def chart(self, u):
        """Return the ambient point of the chart point u."""
        pass

    @abstractmethod
    def chart_jacobian(self, u):
        """Return the derivative of the chart (d × k)."""
        pass

    @abstractmethod
    def locate(self, y):
        """Return the chart point of the ambient point y.

        :returns: chart point or None if y does not lie on the section's
          surface (the chart box is not checked)
        """
        pass

    @abstractmethod
    def locate_jacobian(self, y):
        """Return the derivative of the chart inverse (k × d)."""
        pass

    @abstractmethod
    def g(self, y):
        """Return the event function at the ambient point y."""
        pass

    @abstractmethod
    def grad_g(self, y):
        """Return the gradient of the event function."""
        pass

    def contains(self, u, slack=CHART_SLACK):
        """Return True if u lies in the chart box.

        :param u: chart point(s), shape (k,) or (n, k)
        :param slack: tolerance on non-periodic axes
        :rtype: bool
        """
        u = np.atleast_2d(np.asarray(u, dtype=float))
        mask = np.ones(self.chart_dim(), dtype=bool)
        mask[list(self.periodic)] = False
        inside = (u[:, mask] >= self._lo[mask] - slack) & (u[:, mask] <= self._hi[mask] + slack)
        return bool(np.all(inside) and np.all(np.isfinite(u)))

    def normalize(self, u):
        """Reduce periodic axes into the chart box.

        :param u: chart point(s)
        :rtype: numpy.ndarray
        """
        v = np.array(u, dtype=float, copy=True)
        for axis in self.periodic:
            v[..., axis] = self._lo[axis] + np.mod(v[..., axis] - self._lo[axis], _TWO_PI)
        return v

    def clip(self, u):
        """Clip non-periodic axes to the chart box and normalize the others."""
        v = self.normalize(u)
        mask = np.ones(self.chart_dim(), dtype=bool)
        mask[list(self.periodic)] = False
        v[..., mask] = np.clip(v[..., mask], self._lo[mask], self._hi[mask])
        return v

    def chart_delta(self, u, v):
        """Return u − v with periodic axes wrapped into [−π, π)."""
        d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
        for axis in self.periodic:
            d[..., axis] = wrap_angle(d[..., axis])
        return d

    def boundary_distance(self, u):
        """Return the chart distance from u to the boundary of the chart box.

        Periodic axes have no boundary. Sections without boundary return +∞.
        """
        u = np.asarray(u, dtype=float)
        dist = math.inf
        for axis in range(self.chart_dim()):
            if axis in self.periodic: continue
            dist = min(dist, u[axis] - self._lo[axis], self._hi[axis] - u[axis])
        return float(dist)

    def grid(self, n):
        """Return the cell centres of a uniform grid with n cells per axis.

        :rtype: numpy.ndarray of shape (n**k, k)
        """
        axes = [self._lo[i] + (np.arange(n) + 0.5) * (self._hi[i] - self._lo[i]) / n for i in range(self.chart_dim())]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def samples(self, n):
        """Return a uniform sample of the chart box including its boundary.

        Periodic axes exclude the duplicate endpoint.
        """
        axes = []
        for i in range(self.chart_dim()):
            if i in self.periodic:
                axes.append(self._lo[i] + np.arange(n) * _TWO_PI / n)
            else:
                axes.append(np.linspace(self._lo[i], self._hi[i], n + 1))
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def to_config(self):
        """Return the section configuration."""
        return copy.deepcopy(self._config)

    def __repr__(self):
        return f"{type(self).__name__}('{self._name}', lo={self._lo.tolist()}, hi={self._hi.tolist()})"


class SegmentSection(CrossSection):
    """Straight segment {origin + u·direction} in the plane."""

    TYPE = "segment"
    CONF_REQ_KEYS = {'origin', 'direction', 'lo', 'hi'}
    CONF_VALID_KEYS = {'origin', 'direction'}

    def _check_config(self, config):
        check_param('origin', config, is_list=True, length=2)
        check_param('direction', config, is_list=True, length=2)
        check_param('origin', config, recurse=True, is_num=True)
        check_param('direction', config, recurse=True, is_num=True)
        direction = np.array(config['direction'], dtype=float)
        norm = np.linalg.norm(direction)
        if norm == 0:
            raise ConfigError("The direction of a segment must not vanish.", config)
        self._origin = np.array(config['origin'], dtype=float)
        self._dir = direction / norm
        self._normal = np.array([-self._dir[1], self._dir[0]])

    def chart_dim(self):
        return 1

    def chart(self, u):
        return self._origin + float(np.asarray(u).reshape(-1)[0]) * self._dir

    def chart_jacobian(self, u):
        return self._dir.reshape(2, 1)

    def locate(self, y):
        y = np.asarray(y, dtype=float)
        if abs(self.g(y)) > LOCATE_TOL * max(1.0, np.linalg.norm(y)):
            return None
        return np.array([self._dir @ (y - self._origin)])

    def locate_jacobian(self, y):
        return self._dir.reshape(1, 2)

    def g(self, y):
        return float(self._normal @ (np.asarray(y, dtype=float) - self._origin))

    def grad_g(self, y):
        return self._normal.copy()


class CircleSection(CrossSection):
    """Circle of given centre and radius in the plane, chart by angle."""

    TYPE = "circle"
    CONF_REQ_KEYS = {'center', 'radius'}
    CONF_VALID_KEYS = {'center', 'radius'}

    def _check_config(self, config):
        check_param('center', config, is_list=True, length=2)
        check_param('center', config, recurse=True, is_num=True)
        check_param('radius', config, is_num=True, gr=0)
        self._center = np.array(config['center'], dtype=float)
        self._radius = float(config['radius'])

    def _default_box(self, config):
        return [0.0], [_TWO_PI]

    def chart_dim(self):
        return 1

    @property
    def periodic(self):
        return (0,)

    @property
    def radius(self):
        """Return the circle radius."""
        return self._radius

    def chart(self, u):
        theta = float(np.asarray(u).reshape(-1)[0])
        return self._center + self._radius * np.array([math.cos(theta), math.sin(theta)])

    def chart_jacobian(self, u):
        theta = float(np.asarray(u).reshape(-1)[0])
        return self._radius * np.array([[-math.sin(theta)], [math.cos(theta)]])

    def locate(self, y):
        d = np.asarray(y, dtype=float) - self._center
        if abs(np.linalg.norm(d) - self._radius) > LOCATE_TOL * max(1.0, self._radius):
            return None
        return np.array([math.atan2(d[1], d[0]) % _TWO_PI])

    def locate_jacobian(self, y):
        d = np.asarray(y, dtype=float) - self._center
        return np.array([[-d[1], d[0]]]) / (d @ d)

    def g(self, y):
        d = np.asarray(y, dtype=float) - self._center
        return float(d @ d - self._radius ** 2)

    def grad_g(self, y):
        return 2 * (np.asarray(y, dtype=float) - self._center)


class TorusCircleSection(CrossSection):
    """Vertical circle {x = x0} on the two-torus, chart by the second angle."""

    TYPE = "torus_circle"
    CONF_REQ_KEYS = {'x0'}
    CONF_VALID_KEYS = {'x0'}

    def _check_config(self, config):
        check_param('x0', config, is_num=True)
        self._x0 = float(config['x0'])

    def _default_box(self, config):
        return [0.0], [_TWO_PI]

    def chart_dim(self):
        return 1

    @property
    def periodic(self):
        return (0,)

    @property
    def x0(self):
        """Return the first angle of the circle."""
        return self._x0

    def chart(self, u):
        return np.array([self._x0, float(np.asarray(u).reshape(-1)[0])])

    def chart_jacobian(self, u):
        return np.array([[0.0], [1.0]])

    def locate(self, y):
        y = np.asarray(y, dtype=float)
        if math.cos(y[0] - self._x0) <= 0 or abs(math.sin(y[0] - self._x0)) > LOCATE_TOL:
            return None
        return np.array([y[1] % _TWO_PI])

    def locate_jacobian(self, y):
        return np.array([[0.0, 1.0]])

    def g(self, y):
        return math.sin(y[0] - self._x0)

    def grad_g(self, y):
        return np.array([math.cos(y[0] - self._x0), 0.0])


class SuspensionSection(CrossSection):
    """Level set {s = level} of the suspension coordinate of exact kinds.

    The ambient point is the chart point followed by s. Chart axes listed in
    'wrap' are angles of the ambient space; they are unwrapped around the
    centre of the chart box when locating points.
    """

    TYPE = "suspension"
    CONF_REQ_KEYS = {'level', 'lo', 'hi'}
    CONF_VALID_KEYS = {'level', 'wrap', 'periodic'}

    def _check_config(self, config):
        check_param('level', config, is_num=True)
        self._level = float(config['level'])
        check_param('lo', config, is_list=True)
        self._k = len(config['lo'])
        for key in ('wrap', 'periodic'):
            if config.get(key):
                check_param(key, config, is_list=True)
                check_param(key, config, recurse=True, is_int=True, ge=0, lo=self._k)
        self._wrap = tuple(config.get('wrap', []))
        self._periodic = tuple(config.get('periodic', []))

    def chart_dim(self):
        return self._k

    @property
    def periodic(self):
        return self._periodic

    @property
    def level(self):
        """Return the level of the suspension coordinate."""
        return self._level

    def chart(self, u):
        return np.append(np.asarray(u, dtype=float).reshape(-1), self._level)

    def chart_jacobian(self, u):
        return np.vstack([np.eye(self._k), np.zeros((1, self._k))])

    def locate(self, y):
        y = np.asarray(y, dtype=float)
        if abs(math.remainder(y[-1] - self._level, _TWO_PI)) > LOCATE_TOL:
            return None
        u = y[:-1].copy()
        centre = (self._lo + self._hi) / 2
        for axis in self._wrap:
            u[axis] = centre[axis] + wrap_angle(u[axis] - centre[axis])
        return self.normalize(u)

    def locate_jacobian(self, y):
        return np.hstack([np.eye(self._k), np.zeros((self._k, 1))])

    def g(self, y):
        return math.sin((y[-1] - self._level) / 2)

    def grad_g(self, y):
        grad = np.zeros(self._k + 1)
        grad[-1] = 0.5 * math.cos((y[-1] - self._level) / 2)
        return grad


# Dictionary used to map type names to section classes.
supported_types = {
    'segment': ("impulsive.section", "SegmentSection"),
    'circle': ("impulsive.section", "CircleSection"),
    'torus_circle': ("impulsive.section", "TorusCircleSection"),
    'suspension': ("impulsive.section", "SuspensionSection")}


def create_section(name, config):
    """Create a cross-section from its configuration.

    :param name: section name
    :type name: str
    :param config: section configuration including the key 'type'
    :type config: dict
    :rtype: impulsive.CrossSection
    :raises: ConfigError
    """
    check_param('type', config, is_str=True, options=set(supported_types.keys()))
    ref = supported_types[config['type']]
    section_class = getattr(import_module(ref[0]), ref[1])
    try:
        return section_class(name, config)
    except ConfigError as e:
        raise ConfigError(f"Error in the configuration of section '{name}'. {e}", config)


def chart_to_ambient(S, u):
    """Return the ambient point of a chart point.

    :param S: cross-section
    :type S: impulsive.CrossSection
    :param u: chart point
    :raises: ChartError
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if len(u) != S.chart_dim() or not S.contains(u, slack=0.0):
        raise ChartError(f"Chart point {u.tolist()} lies outside the chart box of section '{S.name}'.")
    return S.chart(u)


def transversality_margin(S, field, n=64):
    """Return the minimum normalized angle between flow and section.

    Evaluates |∇g·X| / (‖∇g‖‖X‖) on the cell centres of an n-grid of the
    chart box.

    :param S: cross-section
    :type S: impulsive.CrossSection
    :param field: vector field
    :type field: impulsive.fields.Field
    :param n: cells per chart axis
    :type n: int
    :rtype: float
    :raises: SingularityError
    """
    margin = math.inf
    for u in S.grid(n):
        x = S.chart(u)
        X = field.eval(x)
        grad = S.grad_g(x)
        speed = np.linalg.norm(X)
        if speed < 1e-14:
            raise SingularityError(f"The {field.kind.value} field vanishes at {x.tolist()} on section '{S.name}'.")
        margin = min(margin, abs(grad @ X) / (np.linalg.norm(grad) * speed))
    return float(margin)


def boundary_distance(S, u):
    """Return the chart distance of u to the boundary of the chart box.

    :param S: cross-section
    :type S: impulsive.CrossSection
    :param u: chart point
    :rtype: float (+∞ for boundaryless sections)
    """
    return S.boundary_distance(u)
