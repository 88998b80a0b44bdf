"""Module providing the scenario runner."""

import hashlib
import logging
import os.path
import sys
import time

from impulsive import AnalysisError, ConfigError

from ..common import (APPLICATION_NAME, EXIT_ANALYSIS, EXIT_CONFIG, EXIT_OK, VERSION, _configure_logging,
                      _load_config)
from .operations import RunContext, supported_operations
from .scenario import load_scenario
from .writers import dumps, ensure_dir, plain, write_csv, write_json, write_jsonl


def config_hash(config):
    """Return the sha256 hash of the canonical JSON text of a scenario."""
    return hashlib.sha256(dumps(config).encode('utf8')).hexdigest()


def _write(out_dir, data_file):
    path = os.path.join(out_dir, data_file.name)
    if data_file.kind == "csv":
        header, rows = data_file.payload
        write_csv(path, header, rows)
    elif data_file.kind == "jsonl":
        write_jsonl(path, data_file.payload)
    else:
        write_json(path, data_file.payload)
    logging.info(f"Runner: Wrote '{path}'.")


def _print_summary(scenario, out_dir, summary, status):
    """Print the one-page summary of a run."""
    print(f"{APPLICATION_NAME} {VERSION}: {scenario.operation} '{scenario.name}' ({status})")
    for key, value in summary.items():
        print(f"  {key}: {dumps(value)}")
    print(f"  output: {out_dir}")


class Runner:
    """Runner of a single scenario."""

    def __init__(self, scenario, config, threads=None, emit_plot_data=None, output=None):
        """Initialize runner.

        :param scenario: scenario to be run
        :type scenario: implab.run.Scenario
        :param config: application configuration
        :type config: dict
        :param threads: maximum number of worker threads (default: configuration)
        :type threads: int
        :param emit_plot_data: True to write plot columns (default: configuration)
        :type emit_plot_data: bool
        :param output: output directory (default: output root and scenario)
        :type output: str
        """
        self._scenario = scenario
        threads = config['threads'] if threads is None else threads
        emit = config['emit_plot_data'] if emit_plot_data is None else emit_plot_data
        self._ctx = RunContext(threads, emit, scenario.seed)
        if output is None:
            output = os.path.join(os.path.expanduser(config['output_root']), scenario.output or scenario.name)
        self._out_dir = output

    @property
    def output(self):
        """Return the output directory."""
        return self._out_dir

    def run(self):
        """Run the scenario and write its outputs.

        :returns: exit code
        :rtype: int
        :raises: ConfigError
        """
        scenario = self._scenario
        start = time.perf_counter()
        manifest = {
            'application': APPLICATION_NAME,
            'version': VERSION,
            'scenario': scenario.name,
            'operation': scenario.operation,
            'config_hash': config_hash(scenario.config),
            'seed': scenario.seed,
            'outputs': [],
            'status': "success",
            'error': None}

        logging.info(f"Runner: Running {scenario.operation} of scenario '{scenario.name}'.")
        code = EXIT_OK
        try:
            system = scenario.system(allow_invalid=True if scenario.operation == "validate" else None)
            result = supported_operations[scenario.operation](system, scenario, self._ctx)
        except AnalysisError as e:
            logging.error(f"Runner: {scenario.operation} of scenario '{scenario.name}' failed. {e}")
            manifest['status'] = "failure"
            manifest['error'] = {'type': type(e).__name__, 'message': str(e), 'jump_index': e.jump_index}
            summary = {'error': type(e).__name__, 'message': str(e)}
            files = []
            code = EXIT_ANALYSIS
        else:
            summary, files = result.summary, result.files
            if result.failed:
                manifest['status'] = "failure"
                code = EXIT_ANALYSIS

        ensure_dir(self._out_dir)
        for data_file in files:
            _write(self._out_dir, data_file)
            manifest['outputs'].append(data_file.name)
        manifest['wall_time'] = time.perf_counter() - start
        write_json(os.path.join(self._out_dir, "manifest.json"), manifest)
        _print_summary(scenario, self._out_dir, plain(summary), manifest['status'])
        return code


def run_scenario(path, config_path=None, threads=None, emit_plot_data=None, output=None):
    """Load and run a scenario file.

    :param path: scenario file
    :type path: str
    :param config_path: application configuration file (default: search
      the configuration paths)
    :type config_path: str
    :returns: exit code (0 success, 1 configuration error, 2 analysis failure)
    :rtype: int
    """
    try:
        config = _load_config(config_path)
        _configure_logging(config, "implab.log")
        scenario = load_scenario(path)
        return Runner(scenario, config, threads, emit_plot_data, output).run()
    except ConfigError as e:
        logging.error(f"Configuration: {e}")
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
