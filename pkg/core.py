#!/usr/bin/env python3
"""
Shared domain types for the localization toolkit.

All types are frozen dataclasses holding only immutable members (tuples instead
of lists), so instances can be shared freely between threads. Every type knows
how to convert itself to and from the plain dictionaries used by the scenario
JSON format.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from errors import FormatError, InputError

logger = logging.getLogger(__name__)

# Physical range of the path-loss exponent reported for indoor environments
PATH_LOSS_EXP_MIN = 1.4
PATH_LOSS_EXP_MAX = 5.1


def _require_finite(name: str, *values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise InputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Position:
    """A point in the floor plane, in meters."""
    x: float
    y: float

    def __post_init__(self):
        _require_finite("position", self.x, self.y)

    def to_dict(self) -> Dict:
        return {"x": self.x, "y": self.y}

    @classmethod
    def from_dict(cls, data: Dict) -> "Position":
        return cls(float(data["x"]), float(data["y"]))

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class RssiSample:
    """One timestamped signal-strength reading from one beacon for one target."""
    beacon_id: str
    target_id: str
    timestamp: int      # ms since epoch
    rssi: float         # dBm

    def __post_init__(self):
        _require_finite("rssi", self.rssi)
        if self.timestamp < 0:
            raise InputError(f"timestamp must be non-negative, got {self.timestamp}")


@dataclass(frozen=True)
class BeaconConfig:
    """A fixed receiver with its path-loss calibration constants."""
    beacon_id: str
    position: Position
    a_ref: float            # dBm at 1 m (A)
    path_loss_exp: float    # n

    def __post_init__(self):
        _require_finite("a_ref", self.a_ref)
        if not PATH_LOSS_EXP_MIN <= self.path_loss_exp <= PATH_LOSS_EXP_MAX:
            raise InputError(
                f"path_loss_exp {self.path_loss_exp} for beacon {self.beacon_id!r} outside "
                f"[{PATH_LOSS_EXP_MIN}, {PATH_LOSS_EXP_MAX}]"
            )

    def to_dict(self) -> Dict:
        return {
            "beacon_id": self.beacon_id,
            "position": self.position.to_dict(),
            "a_ref": self.a_ref,
            "path_loss_exp": self.path_loss_exp,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "BeaconConfig":
        return cls(
            beacon_id=str(data["beacon_id"]),
            position=Position.from_dict(data["position"]),
            a_ref=float(data["a_ref"]),
            path_loss_exp=float(data["path_loss_exp"]),
        )


@dataclass(frozen=True)
class Wall:
    """A straight wall segment with its penetration loss in dB."""
    start: Position
    end: Position
    attenuation: float
    material: str = ""

    def __post_init__(self):
        if self.start == self.end:
            raise InputError("wall endpoints must be distinct")
        if not self.attenuation >= 0:
            raise InputError(f"wall attenuation must be >= 0, got {self.attenuation}")

    def to_dict(self) -> Dict:
        data = {
            "segment": [self.start.to_dict(), self.end.to_dict()],
            "attenuation": self.attenuation,
        }
        if self.material:
            data["material"] = self.material
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "Wall":
        start, end = data["segment"]
        return cls(
            start=Position.from_dict(start),
            end=Position.from_dict(end),
            attenuation=float(data["attenuation"]),
            material=str(data.get("material", "")),
        )


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in meters."""
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        _require_finite("rectangle", self.x_min, self.y_min, self.x_max, self.y_max)
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise InputError(f"degenerate rectangle {self}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def center(self) -> Position:
        return Position((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains(self, p: Position) -> bool:
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max

    def to_dict(self) -> Dict:
        return {"x_min": self.x_min, "y_min": self.y_min, "x_max": self.x_max, "y_max": self.y_max}

    @classmethod
    def from_dict(cls, data: Dict) -> "Rect":
        return cls(float(data["x_min"]), float(data["y_min"]),
                   float(data["x_max"]), float(data["y_max"]))


@dataclass(frozen=True)
class Room:
    name: str
    rect: Rect

    def to_dict(self) -> Dict:
        return {"name": self.name, **self.rect.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict) -> "Room":
        return cls(str(data["name"]), Rect.from_dict(data))


@dataclass(frozen=True)
class GroundTruthInterval:
    """A stationary target position held over [t_start, t_end) ms."""
    t_start: int
    t_end: int
    position: Position

    def __post_init__(self):
        if self.t_start < 0 or self.t_end <= self.t_start:
            raise InputError(f"invalid interval [{self.t_start}, {self.t_end}]")

    def contains(self, t: int) -> bool:
        return self.t_start <= t < self.t_end

    def to_dict(self) -> Dict:
        return {"interval": [self.t_start, self.t_end], "position": self.position.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict) -> "GroundTruthInterval":
        t_start, t_end = data["interval"]
        return cls(int(t_start), int(t_end), Position.from_dict(data["position"]))


def are_collinear(points: Sequence[Position], tol: float = 1e-9) -> bool:
    """True when no triple of points spans a non-zero area."""
    for a, b, c in combinations(points, 3):
        cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
        scale = max(1.0, abs(b.x - a.x) + abs(b.y - a.y)) * max(1.0, abs(c.x - a.x) + abs(c.y - a.y))
        if abs(cross) > tol * scale:
            return False
    return True


@dataclass(frozen=True)
class Scenario:
    """Floor plan, beacon deployment and ground truth for one evaluation site."""
    name: str
    beacons: Tuple[BeaconConfig, ...]
    walls: Tuple[Wall, ...]
    bounds: Rect
    ground_truth: Tuple[GroundTruthInterval, ...]
    rooms: Tuple[Room, ...] = field(default_factory=tuple)
    target_id: str = "target"

    def __post_init__(self):
        # Accept lists from callers but store tuples
        for name in ("beacons", "walls", "ground_truth", "rooms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

        if len(self.beacons) < 3:
            raise InputError(f"scenario {self.name!r} needs at least 3 beacons, has {len(self.beacons)}")
        ids = [b.beacon_id for b in self.beacons]
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate beacon ids in scenario {self.name!r}: {ids}")
        if are_collinear([b.position for b in self.beacons]):
            raise InputError(f"beacons of scenario {self.name!r} are collinear")
        for prev, cur in zip(self.ground_truth, self.ground_truth[1:]):
            if cur.t_start < prev.t_end:
                raise InputError(
                    f"ground-truth intervals overlap or are unordered: "
                    f"[{prev.t_start}, {prev.t_end}] then [{cur.t_start}, {cur.t_end}]"
                )

    @property
    def beacon_ids(self) -> List[str]:
        return [b.beacon_id for b in self.beacons]

    def beacon(self, beacon_id: str) -> BeaconConfig:
        for b in self.beacons:
            if b.beacon_id == beacon_id:
                return b
        raise InputError(f"beacon {beacon_id!r} not in scenario {self.name!r}")

    def interval_at(self, t: int) -> Optional[GroundTruthInterval]:
        for interval in self.ground_truth:
            if interval.contains(t):
                return interval
        return None

    def floor_area(self) -> float:
        """Total room area; falls back to the bounds when no rooms are listed."""
        if not self.rooms:
            return self.bounds.area
        return sum(room.rect.area for room in self.rooms)

    def with_ground_truth(self, ground_truth: Sequence[GroundTruthInterval]) -> "Scenario":
        return Scenario(self.name, self.beacons, self.walls, self.bounds,
                        tuple(ground_truth), self.rooms, self.target_id)

    def without_walls(self) -> "Scenario":
        return Scenario(self.name, self.beacons, (), self.bounds,
                        self.ground_truth, self.rooms, self.target_id)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "target_id": self.target_id,
            "bounds": self.bounds.to_dict(),
            "rooms": [room.to_dict() for room in self.rooms],
            "beacons": [b.to_dict() for b in self.beacons],
            "walls": [w.to_dict() for w in self.walls],
            "ground_truth": [g.to_dict() for g in self.ground_truth],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Scenario":
        return cls(
            name=str(data["name"]),
            beacons=tuple(BeaconConfig.from_dict(b) for b in data["beacons"]),
            walls=tuple(Wall.from_dict(w) for w in data.get("walls", [])),
            bounds=Rect.from_dict(data["bounds"]),
            ground_truth=tuple(GroundTruthInterval.from_dict(g) for g in data.get("ground_truth", [])),
            rooms=tuple(Room.from_dict(r) for r in data.get("rooms", [])),
            target_id=str(data.get("target_id", "target")),
        )


@dataclass(frozen=True)
class PositionEstimate:
    """Output of any localization method."""
    timestamp: int
    position: Position
    residual: float     # m^2, sum of squared circle-equation residuals
    method_tag: str
    iterations: int = 0

    def __post_init__(self):
        if not self.residual >= 0:
            raise InputError(f"residual must be >= 0, got {self.residual}")


def load_scenario(path: str) -> Scenario:
    """
    Load a scenario JSON file.

    Raises:
        FormatError: when the file is not valid JSON or misses a field
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON ({e.msg} at line {e.lineno})", path=path) from e
    try:
        scenario = Scenario.from_dict(data)
    except KeyError as e:
        raise FormatError(f"missing field {e}", path=path) from e
    except (TypeError, ValueError) as e:
        raise FormatError(str(e), path=path) from e
    logger.info(f"Loaded scenario {scenario.name!r} from {path}: "
                f"{len(scenario.beacons)} beacons, {len(scenario.ground_truth)} intervals")
    return scenario


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w") as f:
        json.dump(scenario.to_dict(), f, indent=2)
        f.write("\n")
