"""Module providing the rigid rotation of an annulus."""

import numpy as np

from .base import DOMAIN_SLACK, FIELD_KIND, Field
from ..common import ConfigError


class AnnulusRotation(Field):
    """Rotation X(x, y) = (−y, x) on the annulus r_min ≤ r ≤ r_max."""

    KIND = FIELD_KIND.ANNULUS_ROTATION
    DIM = 2
    DEFAULT_PARAMS = {'r_min': 1.0, 'r_max': 2.0}

    def _check_params(self, params):
        super()._check_params(params)
        if not 0 < params['r_min'] < params['r_max']:
            raise ConfigError(f"Annulus radii must satisfy 0 < r_min < r_max, but r_min={params['r_min']} and r_max={params['r_max']} have been specified.", params)

    def eval(self, x):
        return np.array([-x[1], x[0]], dtype=float)

    def jacobian(self, x):
        return np.array([[0.0, -1.0], [1.0, 0.0]])

    def in_domain(self, x, slack=DOMAIN_SLACK):
        r = np.hypot(x[0], x[1])
        return bool(self._params['r_min'] - slack <= r <= self._params['r_max'] + slack)

    def speed_bound(self):
        return self._params['r_max']
