#!/usr/bin/env python3
"""
Trace and ground-truth CSV files.

Trace:  timestamp_ms,beacon_id,target_id,rssi_dbm   (sorted by timestamp)
Truth:  t_start_ms,t_end_ms,true_x_m,true_y_m
"""
import csv
import logging
from typing import Iterable, List

from core import GroundTruthInterval, Position, RssiSample
from errors import FormatError

logger = logging.getLogger(__name__)

TRACE_HEADER = ["timestamp_ms", "beacon_id", "target_id", "rssi_dbm"]
TRUTH_HEADER = ["t_start_ms", "t_end_ms", "true_x_m", "true_y_m"]


def _check_header(reader, expected, path):
    header = next(reader, None)
    if header is None:
        raise FormatError("file is empty", path=path)
    if [h.strip() for h in header] != expected:
        raise FormatError(f"expected header {','.join(expected)}, got {','.join(header)}",
                          path=path, row=1)


def read_trace_csv(path: str) -> List[RssiSample]:
    """
    Read a trace file.

    Raises:
        FormatError: bad header, malformed row or timestamps out of order
    """
    samples = []
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        _check_header(reader, TRACE_HEADER, path)
        last_timestamp = None
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TRACE_HEADER):
                raise FormatError(f"expected {len(TRACE_HEADER)} fields, got {len(row)}",
                                  path=path, row=row_number)
            try:
                sample = RssiSample(
                    beacon_id=row[1],
                    target_id=row[2],
                    timestamp=int(row[0]),
                    rssi=float(row[3]),
                )
            except ValueError as e:
                raise FormatError(str(e), path=path, row=row_number) from e
            if last_timestamp is not None and sample.timestamp < last_timestamp:
                raise FormatError(f"timestamp {sample.timestamp} earlier than previous {last_timestamp}",
                                  path=path, row=row_number)
            last_timestamp = sample.timestamp
            samples.append(sample)
    logger.info(f"Read {len(samples)} samples from {path}")
    return samples


def write_trace_csv(samples: Iterable[RssiSample], path: str) -> int:
    """Write samples (already time-ordered) and return the row count."""
    count = 0
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for s in samples:
            writer.writerow([s.timestamp, s.beacon_id, s.target_id, repr(float(s.rssi))])
            count += 1
    return count


def read_truth_csv(path: str) -> List[GroundTruthInterval]:
    intervals = []
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        _check_header(reader, TRUTH_HEADER, path)
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TRUTH_HEADER):
                raise FormatError(f"expected {len(TRUTH_HEADER)} fields, got {len(row)}",
                                  path=path, row=row_number)
            try:
                position = Position(float(row[2]), float(row[3]))
                intervals.append(GroundTruthInterval(int(row[0]), int(row[1]), position))
            except ValueError as e:
                raise FormatError(str(e), path=path, row=row_number) from e
    return intervals


def write_truth_csv(intervals: Iterable[GroundTruthInterval], path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRUTH_HEADER)
        for g in intervals:
            writer.writerow([g.t_start, g.t_end, repr(g.position.x), repr(g.position.y)])
