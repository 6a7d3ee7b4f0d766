#!/usr/bin/env python3
"""
Tests for the synthetic trace generator and the builtin scenarios.
"""
import math

import numpy as np
import pytest

from core import BeaconConfig, GroundTruthInterval, Position, Rect, Scenario, Wall
from errors import InputError
from pathloss import PathLossModel, rssi_to_distance
from simulator import (
    INTERVAL_MS,
    NoiseModel,
    builtin_scenarios,
    expected_rssi,
    segments_intersect,
    simulate,
    wall_loss,
)
from traces import TraceStore, write_trace_csv
from trilateration import trilaterate

NOISELESS = NoiseModel(shadowing_sigma=0.0, seed=1)


def _open_scenario(walls=(), target=Position(1.0, 0.0)):
    beacons = [
        BeaconConfig("b1", Position(0.0, 0.0), -67.0, 2.5),
        BeaconConfig("b2", Position(4.0, 0.0), -67.0, 2.5),
        BeaconConfig("b3", Position(0.0, 3.0), -67.0, 2.5),
    ]
    return Scenario("open", beacons, walls, Rect(0.0, 0.0, 4.0, 3.0),
                    [GroundTruthInterval(0, 300000, target)])


def test_noise_model_validation():
    with pytest.raises(InputError):
        NoiseModel(shadowing_sigma=-1.0)
    with pytest.raises(InputError):
        NoiseModel(sample_period=0)
    with pytest.raises(InputError):
        NoiseModel(sample_period=1000, jitter=1000)


def test_reference_distance_gives_a_ref():
    samples = simulate(_open_scenario(), NOISELESS)
    b1 = [s.rssi for s in samples if s.beacon_id == "b1"]
    assert b1 and all(v == pytest.approx(-67.0, abs=1e-12) for v in b1)


def test_wall_subtracts_its_attenuation():
    wall = Wall(Position(0.5, -1.0), Position(0.5, 1.0), 6.0)
    plain = [s.rssi for s in simulate(_open_scenario(), NOISELESS) if s.beacon_id == "b1"]
    walled = [s.rssi for s in simulate(_open_scenario([wall]), NOISELESS) if s.beacon_id == "b1"]
    assert len(plain) == len(walled)
    for a, b in zip(plain, walled):
        assert a - b == pytest.approx(6.0, abs=1e-12)


def test_segments_intersect():
    assert segments_intersect(Position(0, 0), Position(2, 2), Position(0, 2), Position(2, 0))
    assert not segments_intersect(Position(0, 0), Position(1, 0), Position(0, 1), Position(1, 1))
    # Touching an endpoint counts
    assert segments_intersect(Position(0, 0), Position(1, 0), Position(1, 0), Position(1, 1))


def test_wall_loss_sums_crossed_walls():
    walls = [Wall(Position(1, -1), Position(1, 1), 3.0), Wall(Position(2, -1), Position(2, 1), 8.0),
             Wall(Position(5, -1), Position(5, 1), 20.0)]
    assert wall_loss(Position(0, 0), Position(3, 0), walls) == 11.0


def test_coincident_target_is_clamped(caplog):
    beacon = BeaconConfig("b", Position(1.0, 1.0), -67.0, 2.5)
    with caplog.at_level("WARNING"):
        value = expected_rssi(beacon, Position(1.0, 1.0))
    assert value == pytest.approx(-67.0 + 25.0)
    assert "coincides" in caplog.text


def test_samples_stay_inside_intervals_and_increase_per_beacon():
    scenario = builtin_scenarios()["home"]
    samples = simulate(scenario, NoiseModel(4.0, seed=3))
    store = TraceStore(samples)
    for beacon_id in scenario.beacon_ids:
        timestamps = [s.timestamp for s in store.get_samples(beacon_id)]
        assert all(a < b for a, b in zip(timestamps, timestamps[1:]))
    for s in samples:
        interval = scenario.interval_at(s.timestamp)
        assert interval is not None and interval.t_start < s.timestamp < interval.t_end
    keys = [(s.timestamp, s.beacon_id) for s in samples]
    assert keys == sorted(keys)


def test_same_seed_gives_identical_files(tmp_path):
    scenario = builtin_scenarios()["office"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_trace_csv(simulate(scenario, NoiseModel(4.0, seed=9)), str(first))
    write_trace_csv(simulate(scenario, NoiseModel(4.0, seed=9)), str(second))
    assert first.read_bytes() == second.read_bytes()


def test_distinct_seeds_give_distinct_noise():
    scenario = builtin_scenarios()["home"]
    a = [s.rssi for s in simulate(scenario, NoiseModel(4.0, seed=1))]
    b = [s.rssi for s in simulate(scenario, NoiseModel(4.0, seed=2))]
    assert a != b


def test_noise_standard_deviation_matches_sigma():
    scenario = _open_scenario(target=Position(1.5, 1.0))
    scenario = scenario.with_ground_truth(
        [GroundTruthInterval(i * 10_000_000, (i + 1) * 10_000_000, Position(1.5, 1.0)) for i in range(4)])
    deviations = []
    for s in simulate(scenario, NoiseModel(4.0, seed=21, sample_period=1000, jitter=0)):
        deviations.append(s.rssi - expected_rssi(scenario.beacon(s.beacon_id), Position(1.5, 1.0)))
    assert len(deviations) >= 10_000
    assert np.std(deviations) == pytest.approx(4.0, rel=0.1)


@pytest.mark.parametrize("name", ["home", "office"])
def test_noiseless_round_trip(name):
    scenario = builtin_scenarios()[name].without_walls()
    store = TraceStore(simulate(scenario, NOISELESS))
    for interval in scenario.ground_truth:
        anchors = []
        for beacon in scenario.beacons:
            sample = store.get_samples(beacon.beacon_id, interval.t_start, interval.t_end)[0]
            distance = rssi_to_distance(PathLossModel.for_beacon(beacon), sample.rssi)
            true_distance = math.hypot(interval.position.x - beacon.position.x,
                                       interval.position.y - beacon.position.y)
            assert distance == pytest.approx(true_distance, rel=1e-9)
            anchors.append((beacon.position, distance))
        estimate = trilaterate(anchors).position
        assert math.hypot(estimate.x - interval.position.x, estimate.y - interval.position.y) < 1e-6


def test_builtin_scenarios_shape():
    scenarios = builtin_scenarios()
    home, office = scenarios["home"], scenarios["office"]
    assert len(home.beacons) == 3 and len(home.ground_truth) == 3
    assert len(office.beacons) == 3 and len(office.ground_truth) == 5
    assert office.floor_area() > 3 * home.floor_area()
    assert all(g.t_end - g.t_start == INTERVAL_MS for g in home.ground_truth + office.ground_truth)
    assert (home.beacons[0].a_ref, office.beacons[0].a_ref) == (-87.0, -67.0)
    for scenario in (home, office):
        for interval in scenario.ground_truth:
            assert scenario.bounds.contains(interval.position)
