"""Module providing the billiard in the unit disk in suspension coordinates.

A state is (x, θ, s): the last collision point e^{ix} on the unit circle, the
angle θ ∈ (−π/2, π/2) between the outgoing chord and the inward normal, and
the time s elapsed since the collision. Chords have length 2cos θ and are
traversed with unit speed, so the flow is closed-form.
"""

import math

import numpy as np

from .base import DOMAIN_SLACK, FIELD_KIND, ExactField
from ..common import ConfigError, check_param, wrap_angle


# Maximum number of collisions examined by a single first-hit search.
MAX_BOUNCES = 1_000_000


class DiskBilliard(ExactField):
    """Billiard flow in the unit disk."""

    KIND = FIELD_KIND.DISK_BILLIARD
    DIM = 3
    PERIODIC_AXES = (0,)
    DEFAULT_PARAMS = {}

    @staticmethod
    def flight(theta):
        """Return the chord length (flight time) 2cos θ."""
        return 2 * math.cos(theta)

    @staticmethod
    def bounce(x, theta):
        """Return the collision map (x, θ) ↦ (x + π − 2θ, θ)."""
        return x + math.pi - 2 * theta, theta

    def orbit_period(self, x, theta, max_bounces=100000, tol=1e-9):
        """Return the period of the billiard orbit through (x, θ).

        Iterates the collision map until the collision point returns to e^{ix}.

        :param x: collision point angle
        :type x: float
        :param theta: chord angle
        :type theta: float
        :returns: period (sum of chord lengths) and number of collisions
        :rtype: tuple
        :raises: NotFound
        """
        from ..common import NotFound

        y = x
        for n in range(1, max_bounces + 1):
            y, _ = self.bounce(y, theta)
            if abs(wrap_angle(y - x)) < tol:
                return n * self.flight(theta), n
        raise NotFound(f"Billiard: No return of the orbit through ({x}, {theta}) within {max_bounces} collisions.")

    def position(self, x):
        """Return the position in the disk of the state x."""
        p, theta, s = x
        start = np.array([math.cos(p), math.sin(p)])
        p2, _ = self.bounce(p, theta)
        end = np.array([math.cos(p2), math.sin(p2)])
        chord = end - start
        return start + s * chord / np.linalg.norm(chord)

    def eval(self, x):
        return np.array([0.0, 0.0, 1.0])

    def jacobian(self, x):
        return np.zeros((3, 3))

    def in_domain(self, x, slack=DOMAIN_SLACK):
        theta, s = x[1], x[2]
        if not abs(theta) < math.pi / 2:
            return False
        return bool(-slack <= s <= self.flight(theta) + slack)

    def speed_bound(self):
        return 1.0

    def exact_flow(self, x, t, jacobian=False):
        p, theta, s = (float(v) for v in x)
        r = self.flight(theta)
        rot = math.pi - 2 * theta
        total = s + t
        k = math.floor(total / r)
        end = np.array([p + k * rot, theta, total - k * r])

        # Sample the path at the collisions.
        path = [(0.0, np.array(x, dtype=float))]
        if t > 0:
            for j in range(1, min(k, 10000) + 1):
                tj = j * r - s
                if 0 < tj < t:
                    path.append((tj, np.array([p + j * rot, theta, 0.0])))
        if t != 0:
            path.append((t, end))

        jac = None
        if jacobian:
            jac = np.array([
                [1.0, -2.0 * k, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 2.0 * k * math.sin(theta), 1.0]])
        return end, path, jac

    def exact_first_hit(self, x, section, t_max):
        if abs(section.level) > 1e-12:
            raise ConfigError(f"Billiard sections must be collision sections (level 0), but section '{section.name}' has level {section.level}.")
        p, theta, s = (float(v) for v in x)
        r = self.flight(theta)
        rot = math.pi - 2 * theta
        for k in range(1, MAX_BOUNCES + 1):
            tau = k * r - s
            if tau > t_max:
                return None
            if tau <= 0:
                continue
            y = np.array([p + k * rot, theta, 0.0])
            u = section.locate(y)
            if u is not None and section.contains(u):
                dhit = np.array([
                    [1.0, -2.0 * k, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0]])
                dtau = np.array([0.0, -2.0 * k * math.sin(theta), -1.0])
                return tau, y, dhit, dtau
        return None
