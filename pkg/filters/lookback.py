#!/usr/bin/env python3
"""
Look-back-k heuristic: reduce the last k RSSI values of a beacon to one robust value.

  1. drop outliers (min/max pair, or the 1.5 IQR fence)
  2. compute mean and population standard deviation of the survivors
  3. drop values further than one standard deviation from the mean
  4. return the mean of what is left

A stage that leaves nothing falls back to the mean of the previous stage.
"""
import enum
import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from errors import InputError

logger = logging.getLogger(__name__)

IQR_FENCE = 1.5


class OutlierMode(enum.Enum):
    MIN_MAX = "minmax"
    IQR = "iqr"

    @classmethod
    def parse(cls, text) -> "OutlierMode":
        if isinstance(text, OutlierMode):
            return text
        key = str(text).strip().lower().replace("_", "")
        for mode in cls:
            if mode.value == key:
                return mode
        raise InputError(f"unknown outlier mode {text!r} (expected minmax or iqr)")


@dataclass(frozen=True)
class LookbackConfig:
    k: int
    outlier_mode: OutlierMode = OutlierMode.MIN_MAX

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InputError(f"look-back window k must be a positive integer, got {self.k}")
        object.__setattr__(self, "outlier_mode", OutlierMode.parse(self.outlier_mode))


def _remove_outliers(values: np.ndarray, mode: OutlierMode) -> np.ndarray:
    if mode is OutlierMode.MIN_MAX:
        if values.size <= 2:
            return values
        # values are sorted: one occurrence of each extreme sits at either end
        return values[1:-1]

    q1, q3 = np.percentile(values, [25, 75])
    spread = q3 - q1
    keep = (values >= q1 - IQR_FENCE * spread) & (values <= q3 + IQR_FENCE * spread)
    return values[keep]


def lookback_reduce(window: Sequence[float], config: LookbackConfig) -> float:
    """Reduce a window of RSSI values (most recent k) to one value in dBm."""
    values = np.sort(np.asarray(window, dtype=float))
    if values.size == 0:
        raise InputError("look-back window is empty")
    if not np.all(np.isfinite(values)):
        raise InputError(f"look-back window contains non-finite values: {values.tolist()}")

    survivors = _remove_outliers(values, config.outlier_mode)
    if survivors.size == 0:
        logger.warning("outlier removal emptied the window, using the window mean")
        return float(np.mean(values))

    mu = np.mean(survivors)
    sigma = np.std(survivors)
    trimmed = survivors[np.abs(survivors - mu) <= sigma]
    if trimmed.size == 0:
        logger.warning("one-sigma trimming emptied the window, using the outlier-free mean")
        return float(mu)
    return float(np.mean(trimmed))


def lookback_stream(samples: Sequence[float], config: LookbackConfig) -> List[float]:
    """Apply lookback_reduce to the last min(k, j + 1) values at every index j."""
    if len(samples) == 0:
        raise InputError("lookback_stream needs at least one sample")
    values = np.asarray(samples, dtype=float)
    return [lookback_reduce(values[max(0, j - config.k + 1):j + 1], config)
            for j in range(values.size)]
