"""Module providing a skew-product model of the geometric Lorenz flow.

The ambient space is a mapping torus over the square [−1, 1]² with state
(u1, u2, s), s taken mod 2π. The suspension coordinate runs through two legs:

- Leg A (0 ≤ s < π) models the passage near the singularity. It takes the
  time τ_A(u) = τ₀ − ln|u1|/λ and glues s = π to s = 0 of the cusp square
  through the Dulac map P1(x, y) = (sign(x)|x|^a, y).
- Leg B (π ≤ s < 2π) models the return along the unstable manifold. It takes
  the smooth time τ_B(ξ, η) = τ₀ + b_ξ ξ + b_η η and glues back to s = 0
  through P2(ξ, η) = (−sign(ξ)(1 − c|ξ|), −sign(ξ)(h₀ + h₁|ξ|^{1/a}) + h₂ η).

The composition P2∘P1 is the skew product (f(x), H(x, y)) with the expanding
quotient map f(x) = −sign(x)(1 − c|x|^a) and the contraction
H(x, y) = −sign(x)(h₀ + h₁|x|) + h₂ y.
"""

import math

import numpy as np

from .base import DOMAIN_SLACK, FIELD_KIND, ExactField
from ..common import ConfigError


# Maximum number of legs walked by a single flow or first-hit computation.
MAX_LEGS = 1_000_000

_TWO_PI = 2 * math.pi


def _sign(x):
    """Sign with the convention sign(0) = +1."""
    return 1.0 if x >= 0 else -1.0


class LorenzSkew(ExactField):
    """Skew-product section model of the geometric Lorenz attractor."""

    KIND = FIELD_KIND.LORENZ_SKEW
    DIM = 3
    PERIODIC_AXES = (2,)
    DEFAULT_PARAMS = {
        'a': 0.8, 'c': 1.9, 'lam': 1.0, 'tau0': 1.0,
        'h0': 0.5, 'h1': 0.25, 'h2': 0.2,
        'b_xi': 0.05, 'b_eta': 0.1}

    def _check_params(self, params):
        super()._check_params(params)
        p = params
        # Check parameters.
        if not 0 < p['a'] < 1:
            raise ConfigError(f"Parameter 'a' must lie in (0, 1), but {p['a']} has been specified.", params)
        if not (p['c'] * p['a'] > math.sqrt(2) and p['c'] <= 2):
            raise ConfigError(f"Parameter 'c' must satisfy sqrt(2)/a < c <= 2, but {p['c']} has been specified.", params)
        if not (p['lam'] > 0 and p['tau0'] > abs(p['b_xi']) + abs(p['b_eta'])):
            raise ConfigError("Passage times must be positive (lam > 0 and tau0 > |b_xi| + |b_eta|).", params)
        if not (0 < p['h0'] and 0 <= p['h1'] < 1 and 0 <= p['h2'] < 1 and p['h0'] + p['h1'] + p['h2'] <= 1):
            raise ConfigError("Parameters 'h0', 'h1' and 'h2' must satisfy h0 > 0, h1, h2 in [0, 1) and h0 + h1 + h2 <= 1.", params)

        # Verify the expansion of the quotient map on samples.
        xs = np.linspace(-1, 1, 2001)
        xs = xs[xs != 0]
        slopes = p['c'] * p['a'] * np.abs(xs) ** (p['a'] - 1)
        if not np.all(slopes > math.sqrt(2)):
            raise ConfigError("The quotient map must satisfy f'(x) > sqrt(2) for every x.", params)

    # Section maps

    def f(self, x):
        """Return the quotient map f(x) = −sign(x)(1 − c|x|^a)."""
        return -_sign(x) * (1 - self._params['c'] * abs(x) ** self._params['a'])

    def f_prime(self, x):
        """Return f′(x) = c a |x|^(a−1) for x ≠ 0."""
        return self._params['c'] * self._params['a'] * abs(x) ** (self._params['a'] - 1)

    def H(self, x, y):
        """Return the fibre contraction H(x, y) = −sign(x)(h₀ + h₁|x|) + h₂ y."""
        p = self._params
        return -_sign(x) * (p['h0'] + p['h1'] * abs(x)) + p['h2'] * y

    def H_partials(self, x, y):
        """Return (∂H/∂x, ∂H/∂y) for x ≠ 0."""
        return -self._params['h1'], self._params['h2']

    def P1(self, u):
        """Return the Dulac passage across the singularity and its Jacobian."""
        a = self._params['a']
        x, y = u
        image = np.array([_sign(x) * abs(x) ** a, y])
        jac = np.array([[a * abs(x) ** (a - 1) if x != 0 else math.inf, 0.0], [0.0, 1.0]])
        return image, jac

    def P2(self, u):
        """Return the return leg map and its Jacobian."""
        p = self._params
        xi, eta = u
        sg = _sign(xi)
        e = 1 / p['a']
        image = np.array([
            -sg * (1 - p['c'] * abs(xi)),
            -sg * (p['h0'] + p['h1'] * abs(xi) ** e) + p['h2'] * eta])
        d21 = -p['h1'] * e * abs(xi) ** (e - 1) if xi != 0 else 0.0
        jac = np.array([[p['c'], 0.0], [d21, p['h2']]])
        return image, jac

    def passage_time(self, u, leg):
        """Return the time of a full leg and its gradient in u.

        :param u: square coordinates at the start of the leg
        :param leg: "A" or "B"
        :returns: time (inf on the singular line of leg A) and gradient
        :rtype: tuple
        """
        p = self._params
        if leg == "A":
            if u[0] == 0:
                return math.inf, np.array([math.inf, 0.0])
            return p['tau0'] - math.log(abs(u[0])) / p['lam'], np.array([-1 / (p['lam'] * u[0]), 0.0])
        return p['tau0'] + p['b_xi'] * u[0] + p['b_eta'] * u[1], np.array([p['b_xi'], p['b_eta']])

    @staticmethod
    def leg(s):
        """Return the leg of the suspension coordinate s."""
        return "A" if s % _TWO_PI < math.pi else "B"

    # Field interface

    def eval(self, x):
        T, _ = self.passage_time(x[:2], self.leg(x[2]))
        return np.array([0.0, 0.0, math.pi / T if math.isfinite(T) else 0.0])

    def jacobian(self, x):
        T, dT = self.passage_time(x[:2], self.leg(x[2]))
        jac = np.zeros((3, 3))
        if math.isfinite(T):
            jac[2, :2] = -math.pi / T ** 2 * dT
        return jac

    def in_domain(self, x, slack=DOMAIN_SLACK):
        return bool(abs(x[0]) <= 1 + slack and abs(x[1]) <= 1 + slack and math.isfinite(x[2]))

    def speed_bound(self):
        p = self._params
        return math.pi / (p['tau0'] - abs(p['b_xi']) - abs(p['b_eta']))

    def _walk(self, x, t_stop=None, section=None, t_max=math.inf):
        """Walk the legs of the suspension.

        Stops either after the duration t_stop (flow) or at the first
        crossing of the section after positive time (first hit).
        """
        u = np.array(x[:2], dtype=float)
        s = float(x[2])
        s_mod = s % _TWO_PI
        s_base = s - s_mod
        J = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        e_s = np.array([0.0, 0.0, 1.0])
        t_el = 0.0
        g_el = np.zeros(3)
        path = [(0.0, np.array(x, dtype=float))]
        first = True

        for _ in range(MAX_LEGS):
            leg = "A" if s_mod < math.pi else "B"
            end_level = math.pi if leg == "A" else _TWO_PI
            T, dT = self.passage_time(u, leg)
            if not math.isfinite(T):
                # Stationary on the singular line.
                if t_stop is None:
                    return None
                end = np.array([u[0], u[1], s_base + s_mod])
                path.append((t_stop, end))
                jac = np.vstack([J, e_s if first else np.zeros(3)])
                return end, path, jac
            frac = (end_level - s_mod) / math.pi
            dt = frac * T
            g_dt = frac * (dT @ J)
            if first:
                g_dt = g_dt - T / math.pi * e_s

            # Partial leg ending the flow.
            if t_stop is not None and t_el + dt > t_stop:
                r = t_stop - t_el
                end = np.array([u[0], u[1], s_base + s_mod + r * math.pi / T])
                ds = (e_s if first else np.zeros(3)) - g_el * math.pi / T - r * math.pi / T ** 2 * (dT @ J)
                if r > 0:
                    path.append((t_stop, end))
                return end, path, np.vstack([J, ds])

            t_el += dt
            g_el = g_el + g_dt
            if section is not None and t_el > t_max:
                return None
            if leg == "A":
                u, DP = self.P1(u)
                s_mod = math.pi
            else:
                u, DP = self.P2(u)
                s_mod = 0.0
                s_base += _TWO_PI
            J = DP @ J
            first = False
            level = s_base + s_mod
            path.append((t_el, np.array([u[0], u[1], level])))

            if section is not None and abs(math.remainder(s_mod - section.level, _TWO_PI)) < 1e-12:
                y = np.array([u[0], u[1], level])
                v = section.locate(y)
                if v is not None and section.contains(v):
                    dhit = np.vstack([J, np.zeros(3)])
                    return t_el, y, dhit, g_el
        return None

    def exact_flow(self, x, t, jacobian=False):
        if t < 0:
            raise ConfigError("The Lorenz skew-product model only supports forward flows.")
        if t == 0:
            return np.array(x, dtype=float), [(0.0, np.array(x, dtype=float))], np.eye(3) if jacobian else None
        end, path, jac = self._walk(x, t_stop=t)
        return end, path, jac if jacobian else None

    def exact_first_hit(self, x, section, t_max):
        return self._walk(x, section=section, t_max=t_max)
