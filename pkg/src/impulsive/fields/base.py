"""Module providing the vector field base class."""

import copy
import logging

import numpy as np

from abc import ABC, abstractmethod
from enum import Enum

from ..common import ConfigError, check_valid_required, check_param


# Slack applied when testing for membership of the phase domain.
DOMAIN_SLACK = 1e-6


class FIELD_KIND(str, Enum):
    """Kinds of built-in vector fields."""
    ANNULUS_ROTATION = "annulus_rotation"
    PREDATOR_PREY = "predator_prey"
    RADIAL_DISK = "radial_disk"
    TORUS_LINEAR = "torus_linear"
    DISK_BILLIARD = "disk_billiard"
    LORENZ_SKEW = "lorenz_skew"


class Field(ABC):
    """Vector field on a declared phase domain.

    Abstract base class of all built-in vector fields. Sub-classes declare
    their kind, ambient dimension, periodic axes (coordinates identified mod
    2π) and default parameters. Parameters are validated on construction.
    """

    # Kind, ambient dimension and periodic axes. Need to be re-defined by
    # implementing sub-class.
    KIND = None
    DIM = 2
    PERIODIC_AXES = ()
    # True if flow and return maps are closed-form.
    EXACT = False
    # Default parameters. Keys double as the set of valid parameters.
    DEFAULT_PARAMS = {}

    def __init__(self, params=None):
        """Initialize the vector field.

        :param params: named real parameters overriding the defaults
        :type params: dict
        :raises: ConfigError
        """
        params = {} if params is None else params
        check_valid_required(params, set(self.DEFAULT_PARAMS.keys()), set())
        self._params = copy.deepcopy(self.DEFAULT_PARAMS)
        self._params.update(params)
        self._check_params(self._params)
        logging.debug(f"Field: Created {self.KIND} field with parameters {self._params}.")

    def _check_params(self, params):
        """Check parameters for validity.

        Default implementation only checks for finite numbers.

        :param params: merged parameters
        :type params: dict
        :raises: ConfigError
        """
        for key, value in params.items():
            if isinstance(value, bool): continue
            check_param(key, params, is_num=True)

    @property
    def kind(self):
        """Return the field kind."""
        return self.KIND

    @property
    def dim(self):
        """Return the ambient dimension."""
        return self.DIM

    @property
    def periodic_axes(self):
        """Return the coordinates identified mod 2π."""
        return self.PERIODIC_AXES

    @property
    def exact(self):
        """Return True if the flow is closed-form."""
        return self.EXACT

    @property
    def params(self):
        """Return a copy of the field parameters."""
        return copy.deepcopy(self._params)

    @abstractmethod
    def eval(self, x):
        """Return the velocity X(x).

        :param x: ambient point
        :type x: numpy.ndarray
        :rtype: numpy.ndarray
        """
        pass

    @abstractmethod
    def jacobian(self, x):
        """Return the derivative DX(x).

        :param x: ambient point
        :type x: numpy.ndarray
        :rtype: numpy.ndarray
        """
        pass

    @abstractmethod
    def in_domain(self, x, slack=DOMAIN_SLACK):
        """Return True if x lies in the declared phase domain.

        :param x: ambient point
        :type x: numpy.ndarray
        :param slack: absolute tolerance
        :type slack: float
        :rtype: bool
        """
        pass

    @abstractmethod
    def speed_bound(self):
        """Return an upper bound of ‖X‖ on the phase domain."""
        pass

    def equilibria(self):
        """Return the known zeros of the field inside the phase domain.

        :rtype: list of numpy.ndarray
        """
        return []

    def reduce(self, x):
        """Reduce periodic coordinates into [0, 2π).

        Only used at output boundaries.

        :param x: ambient point(s)
        :type x: numpy.ndarray
        :rtype: numpy.ndarray
        """
        y = np.array(x, dtype=float, copy=True)
        for axis in self.PERIODIC_AXES:
            y[..., axis] = np.mod(y[..., axis], 2 * np.pi)
        return y

    def to_config(self):
        """Return the scenario description of the field.

        :rtype: dict
        """
        return {'kind': self.KIND.value, 'params': self.params}

    def __repr__(self):
        return f"{type(self).__name__}({self._params})"


class ExactField(Field):
    """Vector field with closed-form flow and first-hit computations.

    The ambient space of exact fields is a suspension: chart coordinates
    followed by one suspension coordinate s. Sections of exact fields are
    level sets of s.
    """

    EXACT = True

    @abstractmethod
    def exact_flow(self, x, t, jacobian=False):
        """Return the closed-form flow.

        :param x: ambient point
        :type x: numpy.ndarray
        :param t: duration
        :type t: float
        :param jacobian: True if Dφ_t shall be computed
        :type jacobian: bool
        :returns: endpoint, sampled path and Jacobian (or None)
        :rtype: tuple
        """
        pass

    @abstractmethod
    def exact_first_hit(self, x, section, t_max):
        """Return the closed-form first hit of a section.

        :param x: ambient point
        :type x: numpy.ndarray
        :param section: target section (level set of the suspension coordinate)
        :type section: impulsive.section.SuspensionSection
        :param t_max: time horizon
        :type t_max: float
        :returns: None if there is no hit before t_max, otherwise a tuple
          (tau, hit point, hit Jacobian, dτ/dx)
        :rtype: tuple or None
        """
        pass


def require_exact_section(section, field):
    """Make sure sections of exact fields are suspension level sets.

    :raises: ConfigError
    """
    if getattr(section, 'TYPE', None) != "suspension":
        raise ConfigError(f"Sections of {field.KIND.value} fields must be of type 'suspension', but section '{section.name}' is of type '{section.TYPE}'.")
