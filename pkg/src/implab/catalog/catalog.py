"""Module providing the example catalogue commands."""

import json
import logging
import sys

from impulsive import ConfigError, list_examples, make_example

from ..common import EXIT_CONFIG, EXIT_OK
from ..run.writers import plain


def canonical_scenario(name, params=None):
    """Return the canonical scenario of an example.

    The system is described inline, so the scenario runs without the
    catalogue. The operation is a simulation from the example's start point
    over its horizon.

    :param name: example name
    :type name: str
    :param params: example parameters
    :type params: dict
    :rtype: dict
    :raises: UnknownExample, BadParams
    """
    spec = make_example(name, params)
    config = {'name': name}
    config.update(spec.to_config())
    config['operation'] = "simulate"
    config['options'] = {'x': list(spec.start), 'T': spec.horizon}
    config['seed'] = 0
    return plain(config)


def _list():
    for name, summary, quantities in list_examples():
        print(f"{name}")
        print(f"    {summary}")
        print(f"    facts: {', '.join(quantities)}")


def _emit(name, output):
    text = json.dumps(canonical_scenario(name), indent=2) + '\n'
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, 'w', encoding='utf8') as file:
            file.write(text)
        logging.info(f"Catalog: Wrote scenario of example '{name}' to '{output}'.")


def run_catalog(items, output=None):
    """Run an examples subcommand.

    :param items: subcommand ("list" or "emit") and its arguments
    :type items: list
    :param output: output file of "emit" (default: standard output)
    :type output: str
    :returns: exit code
    :rtype: int
    """
    try:
        if items == ["list"]:
            _list()
        elif len(items) == 2 and items[0] == "emit":
            _emit(items[1], output)
        else:
            raise ConfigError(f"Invalid examples subcommand {items}. Use 'examples list' or 'examples emit <name>'.")
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK
