"""Tests of the implab command line application."""

import csv
import json
import os

import pytest

from implab.__main__ import main
from implab.run import Scenario, config_hash
from implab.run.writers import plain
from impulsive import ConfigError


def _run(scenario, app_config, output):
    return main(["run", scenario, "--config", app_config, "--output", str(output)])


def _read_csv(path):
    with open(path, newline='', encoding='utf8') as file:
        return list(csv.DictReader(file))


def _read_json(path):
    with open(path, encoding='utf8') as file:
        return json.load(file)


def test_simulate(tmp_path, app_config, scenario_path):
    out = tmp_path / "out"
    assert _run(scenario_path("annulus_simulate.json"), app_config, out) == 0
    rows = _read_csv(out / "trajectory.csv")
    assert sum(int(row['jump']) for row in rows) == 3
    assert float(rows[-1]['t']) == pytest.approx(10.0)
    assert len(_read_csv(out / "jumps.csv")) == 3
    manifest = _read_json(out / "manifest.json")
    assert manifest['status'] == "success"
    assert manifest['outputs'] == ["trajectory.csv", "jumps.csv"]
    assert manifest['seed'] == 0
    assert len(manifest['config_hash']) == 64


def test_runs_are_deterministic(tmp_path, app_config, scenario_path):
    path = scenario_path("annulus_simulate.json")
    assert _run(path, app_config, tmp_path / "a") == 0
    assert _run(path, app_config, tmp_path / "b") == 0
    for name in ("trajectory.csv", "jumps.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    first, second = _read_json(tmp_path / "a" / "manifest.json"), _read_json(tmp_path / "b" / "manifest.json")
    del first['wall_time'], second['wall_time']
    assert first == second


def test_validate_interchanged_lorenz(tmp_path, app_config, scenario_path):
    out = tmp_path / "out"
    assert _run(scenario_path("lorenz_interchanged_validate.json"), app_config, out) == 0
    record = _read_json(out / "validation.json")
    assert record['verdict'] is False
    assert record['tau1_sup_bound'] == "inf"


def test_inline_scenario(tmp_path, app_config, scenario_path):
    out = tmp_path / "out"
    assert _run(scenario_path("annulus_inline_chain.yaml"), app_config, out) == 0
    edges = _read_csv(out / "adjacency.csv")
    assert edges
    assert {'source', 'target'} == set(edges[0])
    assert len(_read_csv(out / "cells.csv")) == 50


def test_syntax_error(tmp_path, app_config, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "operation": "simulate",\n  oops\n}\n', encoding='utf8')
    assert _run(str(path), app_config, tmp_path / "out") == 1
    err = capsys.readouterr().err
    assert "line 3" in err
    assert "column" in err


def test_unknown_operation(tmp_path, app_config):
    path = tmp_path / "unknown.json"
    path.write_text('{"example": "annulus", "operation": "integrate"}', encoding='utf8')
    assert _run(str(path), app_config, tmp_path / "out") == 1
    assert not (tmp_path / "out").exists()


def test_missing_files(tmp_path, app_config, scenario_path):
    assert _run(str(tmp_path / "missing.json"), app_config, tmp_path / "out") == 1
    missing = str(tmp_path / "missing.yaml")
    assert main(["run", scenario_path("annulus_simulate.json"), "--config", missing]) == 1


def test_output_root_from_environment(tmp_path, app_config, scenario_path, monkeypatch):
    root = tmp_path / "root"
    monkeypatch.setenv("IMPLAB_OUTPUT", str(root))
    assert main(["run", scenario_path("annulus_simulate.json"), "--config", app_config]) == 0
    assert (root / "annulus_simulate" / "manifest.json").is_file()


def test_examples_list(capsys):
    assert main(["examples", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("annulus", "radial_disk", "lorenz_skew"):
        assert name in out


def test_examples_emit(tmp_path, app_config):
    path = tmp_path / "annulus.json"
    assert main(["examples", "emit", "annulus", "--output", str(path)]) == 0
    config = _read_json(path)
    assert config['operation'] == "simulate"
    assert 'example' not in config
    # The emitted scenario runs without the catalogue.
    out = tmp_path / "out"
    assert _run(str(path), app_config, out) == 0
    assert len(_read_csv(out / "jumps.csv")) == 3


def test_examples_errors():
    assert main(["examples", "emit", "nested_disks"]) == 1
    assert main(["examples", "show"]) == 1


def test_scenario_checks():
    with pytest.raises(ConfigError):
        Scenario({'example': "annulus"})
    with pytest.raises(ConfigError):
        Scenario({'example': "annulus", 'operation': "simulate", 'system': {'kind': "annulus_rotation"}})
    with pytest.raises(ConfigError):
        Scenario({'operation': "simulate", 'system': {'kind': "annulus_rotation"}})
    with pytest.raises(ConfigError):
        Scenario({'example': "annulus", 'operation': "simulate", 'seed': -1})


def test_config_hash_ignores_key_order():
    a = {'example': "annulus", 'operation': "simulate", 'options': {'T': 1.0, 'x': [-1.25, 0.0]}}
    b = {'options': {'x': [-1.25, 0.0], 'T': 1.0}, 'operation': "simulate", 'example': "annulus"}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(dict(a, seed=1))


def test_plain():
    assert plain({'a': float('inf'), 'b': (1, 2.5), 'c': 1 + 2j}) == {'a': "inf", 'b': [1, 2.5], 'c': [1.0, 2.0]}
    assert plain(float('nan')) == "nan"


SCENARIOS = ["annulus_simulate.json", "annulus_omega.json", "annulus_inline_chain.yaml", "billiard_poincare.json",
             "lorenz_interchanged_validate.json", "predator_prey_periodic.json", "radial_density.json",
             "torus_close.json"]


@pytest.mark.parametrize("name", SCENARIOS)
def test_shipped_scenarios(tmp_path, app_config, scenario_path, name):
    out = tmp_path / "out"
    assert _run(scenario_path(name), app_config, out) == 0
    assert _read_json(out / "manifest.json")['status'] == "success"


def test_close_torus(tmp_path, app_config, scenario_path):
    out = tmp_path / "out"
    assert _run(scenario_path("torus_close.json"), app_config, out) == 0
    record = _read_json(out / "closing.json")
    assert record['status'] == "success"
    assert record['orbit']['tag'] == "hyperbolic"
    assert record['c1_distance'] <= 0.1


def test_density_runs_are_deterministic(tmp_path, app_config, scenario_path):
    path = scenario_path("radial_density.json")
    assert _run(path, app_config, tmp_path / "a") == 0
    assert _run(path, app_config, tmp_path / "b") == 0
    report = _read_json(tmp_path / "a" / "report.json")
    assert report['cell_count'] == 63
    assert report['fraction'] >= 0.95
    for name in ("report.json", "cells.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
