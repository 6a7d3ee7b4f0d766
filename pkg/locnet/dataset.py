#!/usr/bin/env python3
"""
Network datasets: RSSI triples labelled with the position they were measured at.

Dataset file:      rssi1,rssi2,rssi3,true_x_m,true_y_m,label
Calibration file:  timestamp_ms,beacon_id,rssi_dbm,true_x_m,true_y_m
"""
import csv
import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core import Position, Scenario
from errors import FormatError, InputError
from traces import TraceStore

logger = logging.getLogger(__name__)

DATASET_HEADER = ["rssi1", "rssi2", "rssi3", "true_x_m", "true_y_m", "label"]
CALIBRATION_HEADER = ["timestamp_ms", "beacon_id", "rssi_dbm", "true_x_m", "true_y_m"]

DEFAULT_TICK_MS = 8000
DEFAULT_MAX_STALENESS_MS = 30000


@dataclass(frozen=True, eq=False)
class Dataset:
    inputs: np.ndarray       # (N, 3) dBm, beacon-ordered
    targets: np.ndarray      # (N, 2) m
    labels: Tuple[str, ...]

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if inputs.ndim != 2 or targets.ndim != 2 or targets.shape[1:] != (2,):
            raise InputError(f"bad dataset shapes: inputs {inputs.shape}, targets {targets.shape}")
        if not inputs.shape[0] == targets.shape[0] == len(self.labels):
            raise InputError(f"inputs, targets and labels differ in length: "
                             f"{inputs.shape[0]}, {targets.shape[0]}, {len(self.labels)}")
        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(targets))):
            raise InputError("dataset values must be finite")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))

    @classmethod
    def from_rows(cls, rows: Sequence[Tuple[Sequence[float], Position, str]]) -> "Dataset":
        if not rows:
            raise InputError("dataset is empty")
        return cls(
            inputs=np.array([list(r[0]) for r in rows], dtype=float),
            targets=np.array([r[1].as_tuple() for r in rows], dtype=float),
            labels=tuple(r[2] for r in rows),
        )

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.inputs[indices], self.targets[indices],
                       tuple(self.labels[i] for i in indices))

    def label_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for label in self.labels:
            counts[label] = counts.get(label, 0) + 1
        return counts


def dataset_from_trace(trace, scenario: Scenario, tick_ms: int = DEFAULT_TICK_MS,
                       max_staleness: int = DEFAULT_MAX_STALENESS_MS) -> Dataset:
    """
    Align the beacons at regular ticks inside every ground-truth interval.

    Each triple takes the nearest sample of each beacon within the same
    interval and is labelled with the interval index. A tick that would pick
    exactly the samples of the previous tick is dropped, so a tick shorter than
    the sample period never produces duplicate rows.
    """
    if tick_ms <= 0:
        raise InputError(f"tick_ms must be > 0, got {tick_ms}")
    store = trace if isinstance(trace, TraceStore) else TraceStore(trace)
    beacon_ids = scenario.beacon_ids

    rows = []
    repeated = 0
    for index, interval in enumerate(scenario.ground_truth):
        segment = TraceStore(s for b in beacon_ids
                             for s in store.get_samples(b, interval.t_start, interval.t_end - 1))
        previous = None
        for tick in range(interval.t_start + tick_ms, interval.t_end + 1, tick_ms):
            chosen = [segment.nearest(b, tick, max_staleness) for b in beacon_ids]
            stamps = tuple(s.timestamp for s in chosen)
            if stamps == previous:
                repeated += 1
                continue
            previous = stamps
            rows.append(([s.rssi for s in chosen], interval.position, str(index)))

    if repeated:
        logger.debug(f"Dropped {repeated} ticks that repeated the previous samples")
    dataset = Dataset.from_rows(rows)
    logger.info(f"Built dataset of {len(dataset)} samples from scenario {scenario.name!r} "
                f"({len(scenario.ground_truth)} positions, tick {tick_ms} ms)")
    return dataset


def write_dataset_csv(dataset: Dataset, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for rssi, target, label in zip(dataset.inputs, dataset.targets, dataset.labels):
            writer.writerow([repr(float(v)) for v in rssi]
                            + [repr(float(target[0])), repr(float(target[1])), label])


def _open_checked(f, expected: List[str], path: str):
    reader = csv.reader(f)
    header = next(reader, None)
    if header is None:
        raise FormatError("file is empty", path=path)
    if [h.strip() for h in header] != expected:
        raise FormatError(f"expected header {','.join(expected)}, got {','.join(header)}",
                          path=path, row=1)
    return reader


def read_dataset_csv(path: str) -> Dataset:
    rows = []
    with open(path, "r", newline="") as f:
        reader = _open_checked(f, DATASET_HEADER, path)
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(DATASET_HEADER):
                raise FormatError(f"expected {len(DATASET_HEADER)} fields, got {len(row)}",
                                  path=path, row=row_number)
            try:
                rssi = [float(v) for v in row[:3]]
                target = Position(float(row[3]), float(row[4]))
            except ValueError as e:
                raise FormatError(str(e), path=path, row=row_number) from e
            rows.append((rssi, target, row[5]))
    if not rows:
        raise FormatError("dataset has no rows", path=path)
    logger.info(f"Read {len(rows)} dataset rows from {path}")
    return Dataset.from_rows(rows)


def read_calibration_csv(path: str, beacon_ids: Sequence[str]) -> List[Tuple[Tuple[float, ...], Position]]:
    """
    Read labelled calibration readings, one row per (timestamp, beacon).

    Rows sharing a timestamp form one RSSI tuple in beacon_ids order.

    Raises:
        FormatError: malformed row, unknown beacon or a timestamp missing a beacon
    """
    groups: "OrderedDict[int, Dict]" = OrderedDict()
    with open(path, "r", newline="") as f:
        reader = _open_checked(f, CALIBRATION_HEADER, path)
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CALIBRATION_HEADER):
                raise FormatError(f"expected {len(CALIBRATION_HEADER)} fields, got {len(row)}",
                                  path=path, row=row_number)
            if row[1] not in beacon_ids:
                raise FormatError(f"unknown beacon {row[1]!r}", path=path, row=row_number)
            try:
                timestamp = int(row[0])
                rssi = float(row[2])
                target = Position(float(row[3]), float(row[4]))
            except ValueError as e:
                raise FormatError(str(e), path=path, row=row_number) from e
            group = groups.setdefault(timestamp, {"target": target, "rssi": {}, "row": row_number})
            group["rssi"][row[1]] = rssi

    labeled = []
    for timestamp, group in groups.items():
        missing = [b for b in beacon_ids if b not in group["rssi"]]
        if missing:
            raise FormatError(f"timestamp {timestamp} lacks beacons {', '.join(missing)}",
                              path=path, row=group["row"])
        labeled.append((tuple(group["rssi"][b] for b in beacon_ids), group["target"]))
    logger.info(f"Read {len(labeled)} calibration points from {path}")
    return labeled
