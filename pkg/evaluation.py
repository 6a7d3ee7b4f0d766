#!/usr/bin/env python3
"""
Evaluation of localization methods against ground truth.

For every ground-truth interval the per-beacon streams restart, the method's
filter runs over the samples of that interval, and at each evaluation tick the
latest filtered value of every beacon (never a later one) is converted to a
distance and trilaterated. Errors are Euclidean distances to the true spot.
"""
import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from core import GroundTruthInterval, Position, PositionEstimate, RssiSample, Scenario
from errors import GeometryError, StalenessError
from filters import Method
from pathloss import PathLossModel, locate
from traces import TraceStore
from utils import format_cm, format_interval_label

logger = logging.getLogger(__name__)

DEFAULT_EVAL_PERIOD_MS = 10000
DEFAULT_MAX_STALENESS_MS = 30000

TraceLike = Union[TraceStore, Sequence[RssiSample]]


def euclidean(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _as_store(trace: TraceLike) -> TraceStore:
    return trace if isinstance(trace, TraceStore) else TraceStore(trace)


def align(trace: TraceLike, beacons: Sequence[str], at: int,
          max_staleness: int = DEFAULT_MAX_STALENESS_MS,
          not_after: Union[int, None] = None) -> Tuple[float, ...]:
    """
    RSSI of each beacon from its sample closest in time to `at`.

    Ties go to the earlier sample. With not_after set, later samples are ignored.

    Raises:
        StalenessError: a beacon has no sample within max_staleness
    """
    store = _as_store(trace)
    return tuple(store.nearest(b, at, max_staleness, not_after=not_after).rssi for b in beacons)


def interval_ticks(interval: GroundTruthInterval, eval_period: int) -> List[int]:
    """Evaluation moments t_start + period, t_start + 2 period, ... up to t_end."""
    return list(range(interval.t_start + eval_period, interval.t_end + 1, eval_period))


@dataclass(frozen=True)
class IntervalErrors:
    label: str
    t_start: int
    t_end: int
    errors: Tuple[float, ...]     # m, one per evaluated tick
    skipped: int

    @property
    def ticks(self) -> int:
        return len(self.errors)

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.errors)) if self.errors else math.nan


@dataclass(frozen=True)
class ErrorReport:
    """Errors of one method over all intervals of a scenario."""
    method_label: str
    method_tag: str
    intervals: Tuple[IntervalErrors, ...]
    estimates: Tuple[PositionEstimate, ...] = ()

    @property
    def ticks(self) -> int:
        return sum(i.ticks for i in self.intervals)

    @property
    def skipped(self) -> int:
        return sum(i.skipped for i in self.intervals)

    @property
    def avg_error(self) -> float:
        """Tick-weighted mean over every evaluated tick."""
        all_errors = [e for i in self.intervals for e in i.errors]
        return float(np.mean(all_errors)) if all_errors else math.nan

    @property
    def interval_avg_error(self) -> float:
        """Mean of the per-interval means, each interval weighted equally."""
        means = [i.mean_error for i in self.intervals if i.ticks]
        return float(np.mean(means)) if means else math.nan


def _filtered_segment(store: TraceStore, beacon_id: str, interval: GroundTruthInterval,
                      method: Method) -> TraceStore:
    segment = store.get_samples(beacon_id, interval.t_start, interval.t_end - 1)
    if not segment:
        return TraceStore()
    filtered = method.apply([s.rssi for s in segment])
    return TraceStore(RssiSample(s.beacon_id, s.target_id, s.timestamp, v)
                      for s, v in zip(segment, filtered))


def evaluate(trace: TraceLike, scenario: Scenario, method: Method,
             eval_period: int = DEFAULT_EVAL_PERIOD_MS,
             max_staleness: int = DEFAULT_MAX_STALENESS_MS) -> ErrorReport:
    """
    Localization errors of one method over every ground-truth interval.

    Raises:
        StalenessError: a beacon has no sample close enough to a tick
    """
    store = _as_store(trace)
    beacon_ids = scenario.beacon_ids
    positions = [b.position for b in scenario.beacons]
    models = [PathLossModel.for_beacon(b) for b in scenario.beacons]
    origin = scenario.ground_truth[0].t_start if scenario.ground_truth else 0

    interval_results = []
    estimates = []
    for interval in scenario.ground_truth:
        filtered = {b: _filtered_segment(store, b, interval, method) for b in beacon_ids}
        errors = []
        skipped = 0
        for tick in interval_ticks(interval, eval_period):
            rssi = tuple(filtered[b].nearest(b, tick, max_staleness, not_after=tick).rssi
                         for b in beacon_ids)
            try:
                estimate = locate(positions, rssi, models, timestamp=tick, method_tag=method.tag)
            except GeometryError as e:
                skipped += 1
                logger.warning(f"{method.label}: skipped tick {tick}: {e}")
                continue
            estimates.append(estimate)
            errors.append(euclidean(estimate.position, interval.position))

        interval_results.append(IntervalErrors(
            label=format_interval_label(interval.t_start, interval.t_end, origin),
            t_start=interval.t_start,
            t_end=interval.t_end,
            errors=tuple(errors),
            skipped=skipped,
        ))

    report = ErrorReport(method.label, method.tag, tuple(interval_results), tuple(estimates))
    logger.info(f"{method.label}: avg error {report.avg_error * 100:.2f} cm over "
                f"{report.ticks} ticks ({report.skipped} skipped)")
    return report


def evaluate_methods(trace: TraceLike, scenario: Scenario, methods: Sequence[Method],
                     eval_period: int = DEFAULT_EVAL_PERIOD_MS,
                     max_staleness: int = DEFAULT_MAX_STALENESS_MS,
                     workers: int = 1) -> List[ErrorReport]:
    """evaluate() for several methods; reports come back in method order."""
    store = _as_store(trace)

    def run(method: Method) -> ErrorReport:
        return evaluate(store, scenario, method, eval_period, max_staleness)

    if workers > 1 and len(methods) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, methods))
    return [run(m) for m in methods]


# Report rendering

def _cell(meters: float) -> str:
    return "n/a" if math.isnan(meters) else format_cm(meters)


def report_columns(reports: Sequence[ErrorReport]) -> List[str]:
    labels = [i.label for i in reports[0].intervals] if reports else []
    return labels + ["Avg. error", "Interval avg.", "Skipped"]


def report_rows(reports: Sequence[ErrorReport]) -> Iterable[List[str]]:
    for report in reports:
        yield ([report.method_label]
               + [_cell(i.mean_error) for i in report.intervals]
               + [_cell(report.avg_error), _cell(report.interval_avg_error), str(report.skipped)])


def render_markdown(reports: Sequence[ErrorReport], title: str = "") -> str:
    """Method x interval table in centimetres."""
    columns = ["Method"] + report_columns(reports)
    lines = []
    if title:
        lines += [f"### {title}", ""]
    lines.append("| " + " | ".join(columns) + " |")
    lines.append("|" + "|".join(["---"] + ["---:"] * (len(columns) - 1)) + "|")
    for row in report_rows(reports):
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def render_csv(reports: Sequence[ErrorReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["method"] + report_columns(reports))
    for row in report_rows(reports):
        writer.writerow(row)
    return buffer.getvalue()


def write_report(reports: Sequence[ErrorReport], path: str, title: str = "") -> None:
    """Markdown for .md paths, CSV otherwise."""
    text = render_markdown(reports, title) if str(path).endswith(".md") else render_csv(reports)
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info(f"Wrote report with {len(reports)} rows to {path}")
