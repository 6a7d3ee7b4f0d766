#!/usr/bin/env python3
"""
TraceStore: per-beacon, time-ordered storage of RSSI samples.
Keeps a parallel list of timestamps per beacon so range and nearest-sample
queries are binary searches.
"""

import logging
import threading
import bisect
from collections import defaultdict
from typing import Dict, Iterable, List, Optional

import numpy as np

from core import RssiSample
from errors import StalenessError

logger = logging.getLogger(__name__)


class TraceStore:
    """
    Store of RSSI samples indexed by beacon and timestamp.
    Samples for one beacon are kept sorted by timestamp; inserting out of order
    is allowed and lands at the right position.
    """

    def __init__(self, samples: Optional[Iterable[RssiSample]] = None):
        self._samples = defaultdict(list)     # beacon_id -> list of RssiSample
        self._timestamps = defaultdict(list)  # beacon_id -> list of timestamps (for binary search)
        self._lock = threading.RLock()

        if samples is not None:
            self.add_samples(samples)

    def add_sample(self, sample: RssiSample) -> None:
        """Add one sample, maintaining timestamp order for its beacon."""
        with self._lock:
            beacon_id = sample.beacon_id
            if beacon_id not in self._samples:
                logger.debug(f"Creating new entry for beacon: {beacon_id}")
            timestamps = self._timestamps[beacon_id]
            samples = self._samples[beacon_id]

            # Most samples arrive in order
            if not timestamps or sample.timestamp >= timestamps[-1]:
                samples.append(sample)
                timestamps.append(sample.timestamp)
            else:
                idx = bisect.bisect_right(timestamps, sample.timestamp)
                samples.insert(idx, sample)
                timestamps.insert(idx, sample.timestamp)

    def add_samples(self, samples: Iterable[RssiSample]) -> None:
        for sample in samples:
            self.add_sample(sample)

    def get_samples(self, beacon_id: str, start_time: Optional[int] = None,
                    end_time: Optional[int] = None) -> List[RssiSample]:
        """
        Retrieve samples of one beacon within [start_time, end_time].

        Args:
            beacon_id: Beacon identifier
            start_time: Start timestamp in ms (default: None - no lower bound)
            end_time: End timestamp in ms, inclusive (default: None - no upper bound)

        Returns:
            List of samples in timestamp order
        """
        with self._lock:
            if beacon_id not in self._samples:
                return []

            timestamps = self._timestamps[beacon_id]
            start_idx = 0
            end_idx = len(timestamps)
            if start_time is not None:
                start_idx = bisect.bisect_left(timestamps, start_time)
            if end_time is not None:
                end_idx = bisect.bisect_right(timestamps, end_time)
            return list(self._samples[beacon_id][start_idx:end_idx])

    def get_values(self, beacon_id: str, start_time: Optional[int] = None,
                   end_time: Optional[int] = None) -> np.ndarray:
        """RSSI values of get_samples() as a float array."""
        return np.array([s.rssi for s in self.get_samples(beacon_id, start_time, end_time)],
                        dtype=float)

    def nearest(self, beacon_id: str, at: int, max_staleness: int,
                not_after: Optional[int] = None) -> RssiSample:
        """
        Sample with the smallest |timestamp - at|; ties go to the earlier sample.

        Args:
            beacon_id: Beacon identifier
            at: Query timestamp in ms
            max_staleness: Largest accepted |timestamp - at| in ms
            not_after: Ignore samples later than this timestamp

        Raises:
            StalenessError: no sample within max_staleness
        """
        with self._lock:
            timestamps = self._timestamps.get(beacon_id, [])
            hi = len(timestamps)
            if not_after is not None:
                hi = bisect.bisect_right(timestamps, not_after)

            idx = bisect.bisect_left(timestamps, at, 0, hi)
            best = None
            # idx - 1 is the latest sample before `at`, idx the first at or after it
            for candidate in (idx - 1, idx):
                if 0 <= candidate < hi:
                    gap = abs(timestamps[candidate] - at)
                    if best is None or gap < best[0]:
                        best = (gap, candidate)

            if best is None or best[0] > max_staleness:
                raise StalenessError(beacon_id, at, max_staleness)
            return self._samples[beacon_id][best[1]]

    def get_rssi_stats(self, beacon_id: str, start_time: Optional[int] = None,
                       end_time: Optional[int] = None) -> Dict:
        """
        RSSI statistics for one beacon and time range.

        Returns:
            Dictionary with keys mean, std, min, max, p50, p95, p05, count
        """
        values = self.get_values(beacon_id, start_time, end_time)
        if values.size == 0:
            return {"mean": 0, "std": 0, "min": 0, "max": 0,
                    "p05": 0, "p50": 0, "p95": 0, "count": 0}
        return {
            "mean": float(np.mean(values)),
            "std": float(np.std(values)),
            "min": float(np.min(values)),
            "max": float(np.max(values)),
            "p05": float(np.percentile(values, 5)),
            "p50": float(np.percentile(values, 50)),
            "p95": float(np.percentile(values, 95)),
            "count": int(values.size),
        }

    def __len__(self) -> int:
        with self._lock:
            return sum(len(s) for s in self._samples.values())
