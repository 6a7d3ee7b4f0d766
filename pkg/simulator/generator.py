#!/usr/bin/env python3
"""
Deterministic synthetic RSSI trace generator.

rssi = A - 10 n log10(max(d, 0.1)) - sum(wall losses on the beacon-target line) + N(0, sigma^2)

Each (interval, beacon) pair draws from its own generator derived from the
root seed, so the trace does not depend on generation order.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

from core import BeaconConfig, Position, RssiSample, Scenario, Wall
from errors import InputError
from utils import make_rng

logger = logging.getLogger(__name__)

MIN_DISTANCE = 0.1          # m, distances are clamped here
COINCIDENT_DISTANCE = 1e-3  # m, below this a warning is emitted


@dataclass(frozen=True)
class NoiseModel:
    shadowing_sigma: float = 4.0    # dB
    seed: int = 1
    sample_period: int = 8000       # ms
    jitter: int = 1000              # ms, uniform in [-jitter, +jitter]

    def __post_init__(self):
        if not self.shadowing_sigma >= 0:
            raise InputError(f"shadowing_sigma must be >= 0, got {self.shadowing_sigma}")
        if self.sample_period <= 0:
            raise InputError(f"sample_period must be > 0, got {self.sample_period}")
        if not 0 <= self.jitter < self.sample_period:
            raise InputError(f"jitter must be in [0, sample_period), got {self.jitter}")


def _orientation(a: Position, b: Position, c: Position) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(a: Position, b: Position, p: Position) -> bool:
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)
            and min(a.y, b.y) <= p.y <= max(a.y, b.y))


def segments_intersect(p1: Position, p2: Position, q1: Position, q2: Position) -> bool:
    """True when the closed segments p1p2 and q1q2 share a point."""
    d1 = _orientation(q1, q2, p1)
    d2 = _orientation(q1, q2, p2)
    d3 = _orientation(p1, p2, q1)
    d4 = _orientation(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 \
            and ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    # Touching and collinear cases
    return ((d1 == 0 and _on_segment(q1, q2, p1))
            or (d2 == 0 and _on_segment(q1, q2, p2))
            or (d3 == 0 and _on_segment(p1, p2, q1))
            or (d4 == 0 and _on_segment(p1, p2, q2)))


def wall_loss(a: Position, b: Position, walls: Sequence[Wall]) -> float:
    """Total attenuation in dB of the walls crossed by the segment ab."""
    return sum(w.attenuation for w in walls if segments_intersect(a, b, w.start, w.end))


def expected_rssi(beacon: BeaconConfig, target: Position, walls: Sequence[Wall] = ()) -> float:
    """Noise-free RSSI at a target, walls included."""
    distance = math.hypot(target.x - beacon.position.x, target.y - beacon.position.y)
    if distance < COINCIDENT_DISTANCE:
        logger.warning(f"Target {target} coincides with beacon {beacon.beacon_id!r}; "
                       f"distance clamped to {MIN_DISTANCE} m")
    distance = max(distance, MIN_DISTANCE)
    return (beacon.a_ref - 10.0 * beacon.path_loss_exp * math.log10(distance)
            - wall_loss(beacon.position, target, walls))


def simulate(scenario: Scenario, noise: NoiseModel) -> List[RssiSample]:
    """
    Generate the trace of every beacon for every ground-truth interval.

    Sample times advance by sample_period +/- jitter from the interval start
    and stay strictly inside (t_start, t_end).

    Returns:
        samples ordered by (timestamp, beacon_id)
    """
    samples = []
    for interval_index, interval in enumerate(scenario.ground_truth):
        for beacon in scenario.beacons:
            rng = make_rng(noise.seed, "interval", interval_index, "beacon", beacon.beacon_id)
            mean = expected_rssi(beacon, interval.position, scenario.walls)
            t = interval.t_start
            while True:
                t += noise.sample_period + int(rng.integers(-noise.jitter, noise.jitter + 1))
                if t >= interval.t_end:
                    break
                rssi = mean + noise.shadowing_sigma * float(rng.standard_normal())
                samples.append(RssiSample(beacon.beacon_id, scenario.target_id, t, rssi))

    samples.sort(key=lambda s: (s.timestamp, s.beacon_id))
    logger.info(f"Simulated {len(samples)} samples for scenario {scenario.name!r} "
                f"(sigma={noise.shadowing_sigma} dB, seed={noise.seed})")
    return samples
