"""Module providing scenario loading."""

import json
import logging
import os.path
import yaml

from impulsive import (ConfigError, ImpulsiveSystem, Impulse, IntegratorOpts, check_param, check_valid_required,
                       create_section, field_from_config, make_example)


# Supported operations.
OPERATIONS = ('simulate', 'hitmap', 'poincare', 'periodic', 'audit', 'chain', 'omega', 'close', 'density', 'validate')


def _load_file(path):
    """Load a scenario file.

    JSON is the default format, files ending in .yaml or .yml are read as
    YAML.

    :param path: scenario file
    :type path: str
    :rtype: dict
    :raises: ConfigError naming line and column of syntax errors
    """
    if not os.path.isfile(path):
        raise ConfigError(f"The scenario file '{path}' does not exist.")
    with open(path, 'r', encoding='utf8') as file:
        text = file.read()
    if path.endswith((".yaml", ".yml")):
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
            raise ConfigError(f"Syntax error in scenario file '{path}'{where}: {getattr(e, 'problem', e)}.")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Syntax error in scenario file '{path}' at line {e.lineno}, column {e.colno}: {e.msg}.")


class Scenario:
    """Scenario of a single analysis run.

    The system is either an example of the catalogue (keys 'example' and
    'params') or described inline (keys 'system', 'sections' and 'impulse').
    """

    CONF_REQ_KEYS = {'operation'}
    CONF_VALID_KEYS = {'name', 'example', 'params', 'system', 'sections', 'impulse', 'integrator', 'allow_invalid',
                       'operation', 'options', 'output', 'seed'} | CONF_REQ_KEYS

    def __init__(self, config, name="scenario"):
        """Initialize scenario.

        :param config: scenario configuration
        :type config: dict
        :param name: default scenario name (e.g. file stem)
        :type name: str
        :raises: ConfigError
        """
        check_valid_required(config, self.CONF_VALID_KEYS, self.CONF_REQ_KEYS)
        check_param('operation', config, options=set(OPERATIONS))
        check_param('name', config, required=False, is_str=True)
        check_param('example', config, required=False, is_str=True)
        check_param('output', config, required=False, is_str=True)
        check_param('seed', config, required=False, is_int=True, ge=0)
        check_param('allow_invalid', config, required=False, is_bool=True)
        for key in ('params', 'options', 'integrator', 'system', 'sections', 'impulse'):
            if key in config and not isinstance(config[key], dict):
                raise ConfigError(f"The parameter '{key}' must be a dictionary, but '{config[key]}' has been specified.", config)

        inline = {'system', 'sections', 'impulse'}
        given = inline.intersection(config.keys())
        if 'example' in config:
            if given:
                raise ConfigError(f"A scenario either names an example or describes the system inline, but both 'example' and {sorted(given)} have been specified.", config)
        else:
            if given != inline:
                raise ConfigError(f"A scenario without 'example' requires the parameters {sorted(inline)}, but {sorted(inline - given)} has/have not been specified.", config)
            if 'params' in config:
                raise ConfigError("The parameter 'params' is only valid together with 'example'.", config)
            check_valid_required(config['sections'], {'D', 'Dhat'}, {'D', 'Dhat'})

        self._config = config
        self._name = config.get('name', name)
        self._spec = None

    @property
    def config(self):
        """Return the scenario configuration."""
        return self._config

    @property
    def name(self):
        """Return the scenario name."""
        return self._name

    @property
    def operation(self):
        """Return the operation of the scenario."""
        return self._config['operation']

    @property
    def options(self):
        """Return the operation parameters."""
        return dict(self._config.get('options', {}))

    @property
    def output(self):
        """Return the output directory of the scenario or None."""
        return self._config.get('output')

    @property
    def seed(self):
        """Return the random seed (default: 0)."""
        return self._config.get('seed', 0)

    @property
    def example(self):
        """Return the example specification or None for inline systems."""
        if self._spec is None and 'example' in self._config:
            self._spec = make_example(self._config['example'], self._config.get('params'))
        return self._spec

    def system(self, allow_invalid=None):
        """Create the impulsive system of the scenario.

        :param allow_invalid: overrides the scenario flag if not None
        :type allow_invalid: bool
        :rtype: impulsive.ImpulsiveSystem
        :raises: ConfigError, InvalidSystem
        """
        config = self._config
        spec = self.example
        if spec is not None:
            field, D, Dhat, impulse = spec.field, spec.D, spec.Dhat, spec.impulse
            defaults, flag = spec.opts, spec.allow_invalid
        else:
            field = field_from_config(config['system'])
            D = create_section("D", config['sections']['D'])
            Dhat = create_section("Dhat", config['sections']['Dhat'])
            impulse = Impulse.from_config(config['impulse'], D, Dhat)
            defaults, flag = None, False
        opts = IntegratorOpts.from_config(config.get('integrator'), defaults)
        flag = config.get('allow_invalid', flag)
        if allow_invalid is not None:
            flag = allow_invalid
        logging.info(f"Scenario: Creating system of scenario '{self._name}' ({field.kind.value}).")
        return ImpulsiveSystem.create(field, D, Dhat, impulse, opts, flag)


def load_scenario(path):
    """Load and check a scenario file.

    :param path: scenario file (.json, .yaml or .yml)
    :type path: str
    :rtype: implab.run.Scenario
    :raises: ConfigError
    """
    config = _load_file(path)
    stem = os.path.splitext(os.path.basename(path))[0]
    try:
        return Scenario(config, stem)
    except ConfigError as e:
        raise ConfigError(f"Error in the configuration of scenario '{path}'. {e}", config)
