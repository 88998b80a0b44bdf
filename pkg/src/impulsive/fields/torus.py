"""Module providing the linear flow on the two-torus."""

import math

import numpy as np

from .base import FIELD_KIND, Field
from ..common import check_param


# Inverse golden ratio, the default irrational slope.
GOLDEN_SLOPE = (math.sqrt(5) - 1) / 2


class TorusLinear(Field):
    """Constant field X = (1, alpha) on R²/(2πZ)²."""

    KIND = FIELD_KIND.TORUS_LINEAR
    DIM = 2
    PERIODIC_AXES = (0, 1)
    DEFAULT_PARAMS = {'alpha': GOLDEN_SLOPE}

    def _check_params(self, params):
        check_param('alpha', params, is_num=True)

    def eval(self, x):
        return np.array([1.0, self._params['alpha']])

    def jacobian(self, x):
        return np.zeros((2, 2))

    def in_domain(self, x, slack=0.0):
        return bool(np.all(np.isfinite(x)))

    def speed_bound(self):
        return math.hypot(1.0, self._params['alpha'])
