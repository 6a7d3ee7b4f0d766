#!/usr/bin/env python3
"""
Tests for RSSI <-> distance conversion and (A, n) calibration.
"""
import math

import numpy as np
import pytest

from core import Position
from errors import InputError
from pathloss import PathLossModel, calibrate, distance_to_rssi, rssi_to_distance

OFFICE = PathLossModel(-67.0, 2.5)
HOME = PathLossModel(-87.0, 2.5)
ANCHORS = [Position(0.0, 0.0), Position(4.0, 0.0), Position(0.0, 3.0)]


def _labeled(model, targets):
    points = []
    for target in targets:
        rssi = [distance_to_rssi(model, math.hypot(target.x - a.x, target.y - a.y)) for a in ANCHORS]
        points.append((rssi, target))
    return points


def test_rssi_to_distance_examples():
    assert rssi_to_distance(OFFICE, -67.0) == 1.0
    assert rssi_to_distance(OFFICE, -92.0) == pytest.approx(10.0, rel=1e-12)
    assert rssi_to_distance(HOME, -87.0) == 1.0


def test_distance_to_rssi_examples():
    assert distance_to_rssi(OFFICE, 1.0) == -67.0
    assert distance_to_rssi(OFFICE, 10.0) == pytest.approx(-92.0, abs=1e-12)


@pytest.mark.parametrize("distance", [0.5, 1.0, 2.0, 5.0, 10.0])
def test_round_trip(distance):
    assert rssi_to_distance(OFFICE, distance_to_rssi(OFFICE, distance)) == pytest.approx(distance, rel=1e-9)


def test_monotonic_in_rssi():
    values = np.linspace(-100.0, -40.0, 61)
    distances = [rssi_to_distance(OFFICE, v) for v in values]
    assert all(a > b for a, b in zip(distances, distances[1:]))


def test_invalid_inputs():
    with pytest.raises(InputError):
        rssi_to_distance(OFFICE, math.nan)
    with pytest.raises(InputError):
        distance_to_rssi(OFFICE, 0.0)
    with pytest.raises(InputError):
        PathLossModel(-67.0, 0.0)


def test_calibrate_recovers_generating_model():
    labeled = _labeled(OFFICE, [Position(1.0, 1.0), Position(2.0, 1.5), Position(3.0, 0.5)])
    best = calibrate(labeled, ANCHORS, n_grid=[2.0, 2.3, 2.5, 2.8, 3.0], a_grid=range(-72, -61))
    assert (best.a_ref, best.path_loss_exp) == (-67.0, 2.5)


def test_calibrate_singleton_grid():
    labeled = _labeled(OFFICE, [Position(1.0, 1.0)])
    best = calibrate(labeled, ANCHORS, n_grid=[2.5], a_grid=[-87.0])
    assert (best.a_ref, best.path_loss_exp) == (-87.0, 2.5)


def test_calibrate_ties_prefer_smaller_n():
    # rssi == A gives d = 1 m for every n, so every candidate scores the same
    labeled = [([-70.0, -70.0, -70.0], Position(2.0, 1.5))]
    best = calibrate(labeled, ANCHORS, n_grid=[3.0, 2.0, 2.5], a_grid=[-70.0])
    assert (best.a_ref, best.path_loss_exp) == (-70.0, 2.0)


def test_calibrate_is_independent_of_worker_count():
    labeled = _labeled(OFFICE, [Position(1.0, 1.0), Position(2.5, 2.0)])
    grids = dict(n_grid=[2.0, 2.5, 3.0], a_grid=[-70.0, -67.0, -64.0])
    assert calibrate(labeled, ANCHORS, workers=1, **grids) == calibrate(labeled, ANCHORS, workers=4, **grids)


def test_calibrate_rejects_empty_input():
    with pytest.raises(InputError):
        calibrate([], ANCHORS)
    with pytest.raises(InputError):
        calibrate(_labeled(OFFICE, [Position(1, 1)]), ANCHORS, n_grid=[])
