#!/usr/bin/env python3
"""
Log-distance path loss: RSSI <-> distance conversion and grid-search
calibration of the reference power A and the path-loss exponent n.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core import BeaconConfig, Position
from errors import GeometryError, InputError
from trilateration import trilaterate
from utils import float_range

logger = logging.getLogger(__name__)

DEFAULT_N_GRID = tuple(float_range(1.4, 5.1, 0.1))
DEFAULT_A_GRID = tuple(float(a) for a in range(-95, -54))

# Calibration point: one RSSI value per beacon (beacon order) and the true position
LabeledPoint = Tuple[Sequence[float], Position]


@dataclass(frozen=True)
class PathLossModel:
    """d = 10 ** ((A - rssi) / (10 n))"""
    a_ref: float
    path_loss_exp: float

    def __post_init__(self):
        if not math.isfinite(self.a_ref):
            raise InputError(f"a_ref must be finite, got {self.a_ref}")
        if not self.path_loss_exp > 0:
            raise InputError(f"path_loss_exp must be > 0, got {self.path_loss_exp}")

    @classmethod
    def for_beacon(cls, beacon: BeaconConfig) -> "PathLossModel":
        return cls(beacon.a_ref, beacon.path_loss_exp)


def rssi_to_distance(model: PathLossModel, rssi: float) -> float:
    """Distance in meters for a received signal strength in dBm."""
    if not math.isfinite(rssi):
        raise InputError(f"rssi must be finite, got {rssi!r}")
    return 10.0 ** ((model.a_ref - rssi) / (10.0 * model.path_loss_exp))


def distance_to_rssi(model: PathLossModel, distance: float) -> float:
    """Expected signal strength in dBm at a distance in meters."""
    if not distance > 0:
        raise InputError(f"distance must be positive, got {distance!r}")
    return model.a_ref - 10.0 * model.path_loss_exp * math.log10(distance)


def locate(positions: Sequence[Position], rssi_values: Sequence[float],
           models: Sequence[PathLossModel], timestamp: int = 0, method_tag: str = "raw"):
    """Convert one RSSI per beacon to distances and trilaterate."""
    anchors = [(p, rssi_to_distance(m, v)) for p, v, m in zip(positions, rssi_values, models)]
    return trilaterate(anchors, timestamp=timestamp, method_tag=method_tag)


def _candidate_error(candidate: PathLossModel, labeled: Sequence[LabeledPoint],
                     positions: Sequence[Position]) -> float:
    models = [candidate] * len(positions)
    errors = []
    for rssi_values, truth in labeled:
        try:
            estimate = locate(positions, rssi_values, models).position
        except GeometryError:
            return math.inf
        errors.append(math.hypot(estimate.x - truth.x, estimate.y - truth.y))
    return float(np.mean(errors))


def _sort_key(item: Tuple[float, PathLossModel]):
    error, model = item
    return (error, model.path_loss_exp, abs(model.a_ref))


def calibrate(labeled: Sequence[LabeledPoint], beacons: Sequence[Position],
              n_grid: Optional[Sequence[float]] = None,
              a_grid: Optional[Sequence[float]] = None,
              workers: int = 1) -> PathLossModel:
    """
    Grid search for the (A, n) pair minimizing mean trilateration error.

    Args:
        labeled: calibration points, each an RSSI per beacon plus the true position
        beacons: beacon positions, in the same order as the RSSI values
        n_grid: candidate path-loss exponents (default 1.4..5.1 step 0.1)
        a_grid: candidate reference powers in dBm (default -95..-55 step 1)
        workers: thread pool size; the result does not depend on it

    Returns:
        PathLossModel with the lowest mean error; ties go to smaller n, then smaller |A|
    """
    n_grid = DEFAULT_N_GRID if n_grid is None else tuple(n_grid)
    a_grid = DEFAULT_A_GRID if a_grid is None else tuple(a_grid)
    if not labeled:
        raise InputError("calibration needs at least one labeled point")
    if not n_grid or not a_grid:
        raise InputError("calibration grids must be non-empty")
    for rssi_values, _ in labeled:
        if len(rssi_values) != len(beacons):
            raise InputError(f"expected {len(beacons)} RSSI values per point, got {len(rssi_values)}")

    candidates: List[PathLossModel] = [PathLossModel(a, n) for n in n_grid for a in a_grid]
    logger.info(f"Calibrating over {len(candidates)} (A, n) candidates with "
                f"{len(labeled)} labeled points")

    def score(candidate: PathLossModel) -> Tuple[float, PathLossModel]:
        return _candidate_error(candidate, labeled, beacons), candidate

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scored = list(pool.map(score, candidates))
    else:
        scored = [score(c) for c in candidates]

    best_error, best = min(scored, key=_sort_key)
    if math.isinf(best_error):
        raise GeometryError("no calibration candidate produced a solvable geometry")
    logger.info(f"Calibration winner: A={best.a_ref} dBm, n={best.path_loss_exp} "
                f"(mean error {best_error * 100:.2f} cm)")
    return best
