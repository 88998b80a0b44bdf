"""Collection of built-in vector fields.

Provides the interface definition :class:`impulsive.fields.Field`. Actual
implementations are provided by modules, one per field kind:
    - annulus_rotation: rigid rotation of an annulus.
    - predator_prey: predator-prey system with logistic prey growth.
    - radial_disk: linear contraction of a disk.
    - torus_linear: linear flow on the two-torus.
    - disk_billiard: billiard in the unit disk (closed-form).
    - lorenz_skew: skew-product model of the geometric Lorenz flow
      (closed-form).

Author: Bernd Kalbfuss
License: GNU General Public License v3 (GPLv3)
"""

from importlib import import_module

from .base import DOMAIN_SLACK, FIELD_KIND, Field, ExactField, require_exact_section
from ..common import ConfigError, check_param, check_valid_required


# Dictionary used to map kind names to field classes.
supported_kinds = {
    'annulus_rotation': ("impulsive.fields.annulus", "AnnulusRotation"),
    'predator_prey': ("impulsive.fields.predator_prey", "PredatorPrey"),
    'radial_disk': ("impulsive.fields.radial", "RadialDisk"),
    'torus_linear': ("impulsive.fields.torus", "TorusLinear"),
    'disk_billiard': ("impulsive.fields.billiard", "DiskBilliard"),
    'lorenz_skew': ("impulsive.fields.lorenz", "LorenzSkew")}


def create_field(kind, params=None):
    """Create a vector field from its kind and parameters.

    :param kind: field kind
    :type kind: str or impulsive.fields.FIELD_KIND
    :param params: field parameters
    :type params: dict
    :rtype: impulsive.fields.Field
    :raises: ConfigError
    """
    kind = kind.value if isinstance(kind, FIELD_KIND) else kind
    check_param('kind', kind, is_str=True, options=set(supported_kinds.keys()))
    ref = supported_kinds[kind]
    field_class = getattr(import_module(ref[0]), ref[1])
    try:
        return field_class(params)
    except ConfigError as e:
        raise ConfigError(f"Error in the configuration of field '{kind}'. {e}", params)


def field_from_config(config):
    """Create a vector field from its scenario description.

    :param config: dictionary with keys 'kind' and optional 'params'
    :type config: dict
    :rtype: impulsive.fields.Field
    :raises: ConfigError
    """
    check_valid_required(config, {'kind', 'params'}, {'kind'})
    return create_field(config['kind'], config.get('params'))
