"""Shared fixtures of the test suite.

Example systems are expensive to validate, so they are created once per
session.
"""

import os.path

import pytest

from impulsive import ImpulsiveSystem, IntegratorOpts, make_example


ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCENARIOS = os.path.join(ROOT, "config", "scenarios")


@pytest.fixture(scope="session")
def annulus():
    return make_example("annulus").system()


@pytest.fixture(scope="session")
def predator_prey():
    return make_example("predator_prey").system()


@pytest.fixture(scope="session")
def radial():
    return make_example("radial_disk").system()


@pytest.fixture(scope="session")
def radial_collapsed():
    """Radial disk with δ = 0 and a short horizon (no return from the unit circle)."""
    spec = make_example("radial_disk", {'delta': 0.0})
    opts = IntegratorOpts(step=1e-2, t_max=5.0)
    return ImpulsiveSystem.create(spec.field, spec.D, spec.Dhat, spec.impulse, opts, allow_invalid=True)


@pytest.fixture(scope="session")
def billiard():
    return make_example("disk_billiard").system()


@pytest.fixture(scope="session")
def torus():
    return make_example("torus_linear").system()


@pytest.fixture
def app_config(tmp_path):
    """Application configuration without log files."""
    path = tmp_path / "implab.yaml"
    path.write_text("enable_logging: false\nlog_level: warning\n", encoding="utf8")
    return str(path)


@pytest.fixture
def scenario_path():
    return lambda name: os.path.join(SCENARIOS, name)
