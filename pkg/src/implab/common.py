"""Module providing common definitions."""

import copy
import logging
import os
import os.path
import sys
import yaml

from logging.handlers import TimedRotatingFileHandler
from impulsive import check_param, check_valid_required, ConfigError

from . import __version__


APPLICATION_NAME = "implab"
APPLICATION_DESCRIPTION = "Impulsive dynamical systems laboratory"
VERSION = __version__
PROJECT_NAME = "impulsive-lab"

# Exit codes.
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ANALYSIS = 2

# Environment variable overriding the output root.
OUTPUT_ENV = "IMPLAB_OUTPUT"

# Default configuration
DEFAULT_CONFIG = {
    'emit_plot_data': False,
    'enable_logging': True,
    'log_level': "warning",
    'log_dir': os.path.expanduser(f"~/.cache/{PROJECT_NAME}/log"),
    'output_root': "./output",
    'threads': None
}


# Mapping of name to numeric log level.
LOG_LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
    'critical': logging.CRITICAL
}

# Handlers installed by _configure_logging.
_handlers = []


class Formatter(logging.Formatter):
    """Implab log formatter.

    Renders the component prefix of "Component: message" records as
    "[Component    ]".
    """

    def format(self, record):
        """Split and format record."""
        if isinstance(record.msg, str):
            msg = record.msg.split(':', 1)
            if len(msg) == 2 and msg[0] and ' ' not in msg[0]:
                record = logging.makeLogRecord(record.__dict__)
                record.msg = '[%-13s]%s' % (msg[0], msg[1])
        return super().format(record)


def _check_config(config):
    """Check the application configuration.

    :param config: Application configuration
    :type config: dict
    :raises: ConfigError
    """
    check_valid_required(config, set(DEFAULT_CONFIG.keys()), set())
    check_param('emit_plot_data', config, is_bool=True)
    check_param('enable_logging', config, is_bool=True)
    check_param('log_level', config, options=set(LOG_LEVELS.keys()))
    check_param('log_dir', config, is_str=True)
    check_param('output_root', config, is_str=True)
    if config['threads'] is not None:
        check_param('threads', config, is_int=True, ge=1)


def _configure_logging(config, filename):
    """Configure logging.

    Sets the log level of the root logger, adds a console handler and, if
    enabled, a handler for logging to rotating log files.

    :param config: Application configuration
    :type config: dict
    :param filename: Log filename
    :type filename: str
    :raises: Raises an exception if the directory cannot be created or is
      not writable.
    """
    numeric_level = LOG_LEVELS[config['log_level']]
    root = logging.getLogger()
    root.setLevel(numeric_level)

    # Remove handlers of a previous configuration.
    while _handlers:
        root.removeHandler(_handlers.pop())

    formatter = Formatter("%(asctime)s [%(levelname)-8s] %(message)s", "%Y-%m-%d %H:%M:%S")
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(formatter)
    root.addHandler(console)
    _handlers.append(console)

    if not config['enable_logging']:
        return

    # Create log directory if it does not exist yet.
    log_dir = os.path.expanduser(config['log_dir'])
    if not os.path.exists(log_dir):
        try:
            os.makedirs(log_dir, exist_ok=True)
        except Exception as e:
            raise Exception(f"An exception occurred while creating the log directory '{log_dir}': {e}")

    # Make sure the directory is writable.
    if not os.access(log_dir, os.W_OK):
        raise Exception(f"The log directory '{log_dir}' is not writeable.")

    # Write all log messages to a rotating log file.
    try:
        fullpath = os.path.join(log_dir, filename)
        logHandler = TimedRotatingFileHandler(fullpath, when="h", interval=24, backupCount=5, encoding='utf-8', errors='ignore')
        logHandler.setFormatter(formatter)
        logging.info(f"Configuration: Enabling logging to file '{fullpath}'.")
        root.addHandler(logHandler)
        _handlers.append(logHandler)
    except Exception as e:
        raise Exception(f"An error occurred while installing the log handler: {e}")


def _load_config(path=None):
    """Load application configuration.

    Loads the application configuration from the first configuration file
    found and applies default values where missing. The environment variable
    IMPLAB_OUTPUT overrides the output root.

    :param path: explicit configuration file (default: search the
      configuration paths)
    :type path: str
    :returns: Application configuration
    :rtype: dict
    :raises: ConfigError
    """
    conf_paths = [path] if path is not None else [
        "./implab.yaml",
        os.path.expanduser(f"~/.config/{PROJECT_NAME}/config.yaml"),
        f"/etc/{PROJECT_NAME}/config.yaml",
        f"{sys.prefix}/share/{PROJECT_NAME}/config/config.yaml"
    ]

    # Copy default configuration.
    config = copy.deepcopy(DEFAULT_CONFIG)

    # Determine path of configuration file.
    found = next((p for p in conf_paths if os.path.isfile(p)), None)
    if found is None and path is not None:
        raise ConfigError(f"The configuration file '{path}' does not exist.")

    # Load configuration from yaml file and update defaults.
    if found is not None:
        logging.info(f"Configuration: Loading configuration from file '{found}'.")
        try:
            with open(found, 'r', encoding='utf8') as config_file:
                config2 = yaml.safe_load(config_file)
        except yaml.YAMLError as e:
            raise ConfigError(f"The configuration file '{found}' is not valid YAML. {e}")
        if config2 is not None:
            if not isinstance(config2, dict):
                raise ConfigError(f"The configuration file '{found}' must contain a dictionary.", config2)
            config.update(config2)

    if os.environ.get(OUTPUT_ENV):
        config['output_root'] = os.environ[OUTPUT_ENV]

    _check_config(config)
    logging.debug(f"Configuration: Configuration = {config}")
    return config
