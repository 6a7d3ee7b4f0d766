#!/usr/bin/env python3
"""
Builtin evaluation sites: a three-room home and a two-room office section.

Room rectangles follow the measured room sizes of the two sites. Home beacons
sit at room centers with each target 0.5-1 m from one of them; office beacons
are two in the meeting room and one in the hallway, with targets spread over
both rooms. Each target is held for a 15 minute interval.
"""
from typing import Dict

from core import BeaconConfig, GroundTruthInterval, Position, Rect, Room, Scenario, Wall

INTERVAL_MS = 15 * 60 * 1000
MINUTE_MS = 60 * 1000

HOME_A_REF = -87.0
OFFICE_A_REF = -67.0
PATH_LOSS_EXP = 2.5

BRICK_DB = 8.0
PLASTERBOARD_DB = 3.0


def _interval(start_min: int, position: Position) -> GroundTruthInterval:
    start = start_min * MINUTE_MS
    return GroundTruthInterval(start, start + INTERVAL_MS, position)


def home_scenario() -> Scenario:
    bedroom = Rect(0.0, 0.0, 2.50, 3.29)
    study = Rect(0.0, 3.29, 2.50, 4.29)
    hallway = Rect(2.50, 2.08, 4.84, 4.29)

    beacons = (
        BeaconConfig("bedroom", bedroom.center, HOME_A_REF, PATH_LOSS_EXP),
        BeaconConfig("study", study.center, HOME_A_REF, PATH_LOSS_EXP),
        BeaconConfig("hallway", hallway.center, HOME_A_REF, PATH_LOSS_EXP),
    )
    walls = (
        Wall(Position(0.0, 3.29), Position(2.50, 3.29), BRICK_DB, "brick"),
        Wall(Position(2.50, 2.08), Position(2.50, 3.29), BRICK_DB, "brick"),
        Wall(Position(2.50, 3.29), Position(2.50, 4.29), BRICK_DB, "brick"),
    )
    # 1 min gap after the first interval, 3 min after the second
    ground_truth = (
        _interval(0, Position(1.60, 0.95)),
        _interval(16, Position(0.55, 3.79)),
        _interval(34, Position(3.90, 2.55)),
    )
    return Scenario(
        name="home",
        beacons=beacons,
        walls=walls,
        bounds=Rect(0.0, 0.0, 4.84, 4.29),
        ground_truth=ground_truth,
        rooms=(Room("bedroom", bedroom), Room("study", study), Room("hallway", hallway)),
    )


def office_scenario() -> Scenario:
    meeting = Rect(0.0, 0.0, 5.60, 7.80)
    hallway = Rect(5.60, 0.0, 7.20, 5.60)

    beacons = (
        BeaconConfig("meeting-window", Position(1.40, 5.85), OFFICE_A_REF, PATH_LOSS_EXP),
        BeaconConfig("meeting-wall", Position(4.20, 1.95), OFFICE_A_REF, PATH_LOSS_EXP),
        BeaconConfig("hallway", Position(6.40, 2.80), OFFICE_A_REF, PATH_LOSS_EXP),
    )
    walls = (
        Wall(Position(5.60, 0.0), Position(5.60, 5.60), PLASTERBOARD_DB, "plasterboard"),
    )
    ground_truth = (
        _interval(0, Position(2.80, 3.90)),
        _interval(15, Position(1.20, 2.20)),
        _interval(30, Position(3.90, 6.10)),
        _interval(45, Position(6.40, 1.20)),
        _interval(60, Position(6.40, 4.60)),
    )
    return Scenario(
        name="office",
        beacons=beacons,
        walls=walls,
        bounds=Rect(0.0, 0.0, 7.20, 7.80),
        ground_truth=ground_truth,
        rooms=(Room("meeting room", meeting), Room("hallway", hallway)),
    )


def builtin_scenarios() -> Dict[str, Scenario]:
    return {"home": home_scenario(), "office": office_scenario()}
