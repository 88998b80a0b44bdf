"""Tests of cross-sections."""

import math

import numpy as np
import pytest

from impulsive import (ChartError, ConfigError, SingularityError, boundary_distance, chart_to_ambient, create_field,
                       create_section, transversality_margin)


def _segment(**kwargs):
    config = {'type': "segment", 'origin': [0, 0], 'direction': [2, 0], 'lo': [1], 'hi': [2]}
    config.update(kwargs)
    return create_section("S", config)


def test_segment_chart():
    S = _segment()
    assert np.allclose(S.chart([1.5]), [1.5, 0.0])
    assert np.allclose(S.locate([1.25, 0.0]), [1.25])
    assert S.locate([1.25, 0.1]) is None
    assert S.chart_dim() == 1
    assert S.periodic == ()


def test_circle_chart_is_periodic():
    S = create_section("C", {'type': "circle", 'center': [0, 0], 'radius': 1.5})
    assert S.periodic == (0,)
    assert np.allclose(S.chart([math.pi / 2]), [0.0, 1.5])
    assert S.normalize(np.array([2 * math.pi + 0.1]))[0] == pytest.approx(0.1)
    assert S.chart_delta(np.array([0.1]), np.array([2 * math.pi - 0.1]))[0] == pytest.approx(0.2)
    assert boundary_distance(S, [1.0]) == math.inf


def test_boundary_distance():
    S = _segment()
    assert boundary_distance(S, [1.2]) == pytest.approx(0.2)
    assert boundary_distance(S, [1.9]) == pytest.approx(0.1)


def test_chart_to_ambient_outside_box():
    with pytest.raises(ChartError):
        chart_to_ambient(_segment(), [2.5])


def test_grid_and_samples():
    S = create_section("B", {'type': "suspension", 'level': 0, 'lo': [-1, -1], 'hi': [1, 1]})
    grid = S.grid(4)
    assert grid.shape == (16, 2)
    assert np.all(np.abs(grid) < 1)
    assert S.samples(4).shape == (25, 2)


def test_transversality_margin():
    field = create_field("annulus_rotation")
    assert transversality_margin(_segment(), field) == pytest.approx(1.0)


def test_vanishing_field_on_section():
    field = create_field("predator_prey")
    S = create_section("S", {'type': "segment", 'origin': [2, 0], 'direction': [0, 1], 'lo': [0.5], 'hi': [1.5]})
    with pytest.raises(SingularityError):
        transversality_margin(S, field, n=1)


@pytest.mark.parametrize("config", [
    {'type': "segment", 'origin': [0, 0], 'direction': [1, 0], 'lo': [2], 'hi': [1]},
    {'type': "segment", 'origin': [0, 0], 'direction': [0, 0], 'lo': [1], 'hi': [2]},
    {'type': "segment", 'origin': [0, 0], 'direction': [1, 0], 'lo': [1]},
    {'type': "circle", 'center': [0, 0], 'radius': -1},
    {'type': "ellipse", 'center': [0, 0]},
    {'type': "segment", 'origin': [0, 0], 'direction': [1, 0], 'lo': [1], 'hi': [2], 'boundary_margin': -0.1}])
def test_invalid_config(config):
    with pytest.raises(ConfigError):
        create_section("S", config)
