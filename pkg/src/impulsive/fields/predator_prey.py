"""Module providing a Lotka-Volterra predator-prey field with logistic prey."""

import numpy as np

from .base import DOMAIN_SLACK, FIELD_KIND, Field


class PredatorPrey(Field):
    """Field X(x, y) = (x(a − x − y), y(−b + x − y)) on [0, x_max]×[0, y_max].

    With the defaults a=3, b=1 the interior equilibrium is (2, 1) and the
    positive quadrant is invariant.
    """

    KIND = FIELD_KIND.PREDATOR_PREY
    DIM = 2
    DEFAULT_PARAMS = {'a': 3.0, 'b': 1.0, 'x_max': 4.0, 'y_max': 2.0}

    def eval(self, x):
        a, b = self._params['a'], self._params['b']
        return np.array([x[0] * (a - x[0] - x[1]), x[1] * (-b + x[0] - x[1])], dtype=float)

    def jacobian(self, x):
        a, b = self._params['a'], self._params['b']
        return np.array([
            [a - 2 * x[0] - x[1], -x[0]],
            [x[1], -b + x[0] - 2 * x[1]]])

    def in_domain(self, x, slack=DOMAIN_SLACK):
        return bool(-slack <= x[0] <= self._params['x_max'] + slack and -slack <= x[1] <= self._params['y_max'] + slack)

    def speed_bound(self):
        # Maximum over a dense grid of the box, rounded up.
        xs = np.linspace(0, self._params['x_max'], 201)
        ys = np.linspace(0, self._params['y_max'], 201)
        gx, gy = np.meshgrid(xs, ys)
        a, b = self._params['a'], self._params['b']
        speed = np.hypot(gx * (a - gx - gy), gy * (-b + gx - gy))
        return float(speed.max()) * 1.01

    def equilibria(self):
        a, b = self._params['a'], self._params['b']
        points = [np.array([0.0, 0.0]), np.array([a, 0.0])]
        xi, yi = (a + b) / 2, (a - b) / 2
        if yi > 0:
            points.append(np.array([xi, yi]))
        return [p for p in points if self.in_domain(p, 0.0)]
