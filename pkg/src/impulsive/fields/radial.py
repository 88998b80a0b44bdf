"""Module providing the linear contraction X(x) = −x of a disk."""

import numpy as np

from .base import DOMAIN_SLACK, FIELD_KIND, Field
from ..common import check_param


class RadialDisk(Field):
    """Contraction X(x) = −x on the closed disk of the given radius."""

    KIND = FIELD_KIND.RADIAL_DISK
    DIM = 2
    DEFAULT_PARAMS = {'radius': 3.0}

    def _check_params(self, params):
        check_param('radius', params, is_num=True, gr=0)

    def eval(self, x):
        return -np.asarray(x, dtype=float)

    def jacobian(self, x):
        return -np.eye(2)

    def in_domain(self, x, slack=DOMAIN_SLACK):
        return bool(np.hypot(x[0], x[1]) <= self._params['radius'] + slack)

    def speed_bound(self):
        return self._params['radius']

    def equilibria(self):
        return [np.zeros(2)]
