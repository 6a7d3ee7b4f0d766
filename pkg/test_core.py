#!/usr/bin/env python3
"""
Tests for the domain types, scenario files, config loading and utilities.
"""
import json
import logging
import math

import pytest

from config import load_config_file
from core import (
    BeaconConfig,
    GroundTruthInterval,
    Position,
    PositionEstimate,
    Rect,
    RssiSample,
    Scenario,
    Wall,
    are_collinear,
    load_scenario,
    save_scenario,
)
from errors import ConfigError, FormatError, InputError, StalenessError
from utils import derive_seed, float_range, format_cm, format_interval_label, make_rng, parse_int_list

logger = logging.getLogger(__name__)


def _beacons(positions=((0.0, 0.0), (4.0, 0.0), (0.0, 3.0))):
    return [BeaconConfig(f"b{i + 1}", Position(x, y), -67.0, 2.5) for i, (x, y) in enumerate(positions)]


def _scenario(**overrides):
    fields = dict(
        name="test",
        beacons=_beacons(),
        walls=[Wall(Position(2.0, -1.0), Position(2.0, 4.0), 6.0, "brick")],
        bounds=Rect(0.0, 0.0, 4.0, 3.0),
        ground_truth=[GroundTruthInterval(0, 60000, Position(1.0, 1.0)),
                      GroundTruthInterval(60000, 120000, Position(2.0, 1.5))],
    )
    fields.update(overrides)
    return Scenario(**fields)


def test_position_rejects_non_finite():
    with pytest.raises(InputError):
        Position(math.nan, 0.0)
    with pytest.raises(InputError):
        Position(0.0, math.inf)


def test_rssi_sample_validation():
    with pytest.raises(InputError):
        RssiSample("b1", "target", 0, math.nan)
    with pytest.raises(InputError):
        RssiSample("b1", "target", -1, -70.0)


def test_beacon_path_loss_exponent_range():
    BeaconConfig("b", Position(0, 0), -67.0, 1.4)
    BeaconConfig("b", Position(0, 0), -67.0, 5.1)
    with pytest.raises(InputError):
        BeaconConfig("b", Position(0, 0), -67.0, 1.3)
    with pytest.raises(InputError):
        BeaconConfig("b", Position(0, 0), -67.0, 5.2)


def test_wall_validation():
    with pytest.raises(InputError):
        Wall(Position(1, 1), Position(1, 1), 3.0)
    with pytest.raises(InputError):
        Wall(Position(0, 0), Position(1, 1), -1.0)


def test_interval_validation():
    with pytest.raises(InputError):
        GroundTruthInterval(1000, 1000, Position(0, 0))
    interval = GroundTruthInterval(0, 10, Position(0, 0))
    assert interval.contains(0) and interval.contains(9)
    assert not interval.contains(10)


def test_adjacent_intervals_own_their_start():
    scenario = _scenario()
    assert scenario.interval_at(60000).position == Position(2.0, 1.5)
    assert scenario.interval_at(59999).position == Position(1.0, 1.0)
    assert scenario.interval_at(120000) is None


def test_collinear_detection():
    assert are_collinear([Position(0, 0), Position(1, 0), Position(2, 0)])
    assert not are_collinear([Position(0, 0), Position(4, 0), Position(0, 3)])


def test_scenario_needs_three_non_collinear_beacons():
    with pytest.raises(InputError):
        _scenario(beacons=_beacons()[:2])
    with pytest.raises(InputError):
        _scenario(beacons=_beacons(((0, 0), (1, 0), (2, 0))))
    duplicate = _beacons()
    duplicate[2] = BeaconConfig("b1", Position(0.0, 3.0), -67.0, 2.5)
    with pytest.raises(InputError):
        _scenario(beacons=duplicate)


def test_scenario_rejects_overlapping_intervals():
    with pytest.raises(InputError):
        _scenario(ground_truth=[GroundTruthInterval(0, 60000, Position(1, 1)),
                                GroundTruthInterval(30000, 90000, Position(2, 1))])


def test_scenario_helpers():
    scenario = _scenario()
    assert scenario.beacon_ids == ["b1", "b2", "b3"]
    assert scenario.beacon("b2").position == Position(4.0, 0.0)
    assert scenario.interval_at(70000).position == Position(2.0, 1.5)
    assert scenario.interval_at(500000) is None
    assert scenario.floor_area() == pytest.approx(12.0)
    assert scenario.without_walls().walls == ()
    with pytest.raises(InputError):
        scenario.beacon("missing")


def test_scenario_file_round_trip(tmp_path):
    scenario = _scenario()
    path = tmp_path / "scenario.json"
    save_scenario(scenario, str(path))
    assert load_scenario(str(path)) == scenario


def test_load_scenario_reports_format_errors(tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    with pytest.raises(FormatError) as excinfo:
        load_scenario(str(bad_json))
    assert str(bad_json) in str(excinfo.value)

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"name": "x"}))
    with pytest.raises(FormatError):
        load_scenario(str(missing))


def test_position_estimate_residual_non_negative():
    with pytest.raises(InputError):
        PositionEstimate(0, Position(0, 0), -1.0, "raw")


def test_error_messages_carry_context():
    error = StalenessError("bedroom", 1000, 30000)
    assert "bedroom" in str(error)
    assert FormatError("bad row", path="trace.csv", row=7).row == 7
    assert "trace.csv, row 7" in str(FormatError("bad row", path="trace.csv", row=7))


def test_derive_seed_is_stable_and_key_dependent():
    assert derive_seed(1, "fold", 3) == derive_seed(1, "fold", 3)
    assert derive_seed(1, "fold", 3) != derive_seed(1, "fold", 4)
    assert derive_seed(1, "fold", 3) != derive_seed(2, "fold", 3)
    a = make_rng(5, "beacon", "study").standard_normal(4)
    b = make_rng(5, "beacon", "study").standard_normal(4)
    assert a.tolist() == b.tolist()


def test_formatting_helpers():
    assert format_cm(1.2345) == "123.45"
    assert format_cm(0.0) == "0.00"
    assert format_interval_label(0, 15 * 60000) == "0:00-0:15"
    assert format_interval_label(60 * 60000, 75 * 60000) == "1:00-1:15"


def test_parse_int_list():
    assert parse_int_list("100, 500,1000") == (100, 500, 1000)
    for bad in ("", "1,x", "0,1"):
        with pytest.raises(ValueError):
            parse_int_list(bad)


def test_float_range_is_inclusive_and_rounded():
    grid = float_range(1.4, 5.1, 0.1)
    assert grid[0] == 1.4 and grid[-1] == 5.1
    assert len(grid) == 38
    assert 2.5 in grid


def test_load_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"max-staleness": 20000, "sigma": 2.0}))
    settings = load_config_file(str(path), allowed_keys={"max_staleness", "sigma"})
    assert settings == {"max_staleness": 20000, "sigma": 2.0}

    with pytest.raises(ConfigError):
        load_config_file(str(path), allowed_keys={"sigma"})
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config_file(str(path))
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / "absent.json"))
