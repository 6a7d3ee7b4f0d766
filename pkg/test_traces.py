#!/usr/bin/env python3
"""
Tests for the TraceStore and the trace/truth CSV files.
"""
import logging

import pytest

from core import GroundTruthInterval, Position, RssiSample
from errors import FormatError, StalenessError
from traces import TraceStore, read_trace_csv, read_truth_csv, write_trace_csv, write_truth_csv

logger = logging.getLogger(__name__)


def _sample(beacon_id, timestamp, rssi):
    return RssiSample(beacon_id, "target", timestamp, rssi)


@pytest.fixture
def samples():
    result = [_sample("bedroom", t, -70.0 - i) for i, t in enumerate((1000, 3000, 5000, 7000))]
    result += [_sample("study", t, -80.0) for t in (2000, 6000)]
    return sorted(result, key=lambda s: (s.timestamp, s.beacon_id))


@pytest.fixture
def store(samples):
    return TraceStore(samples)


def test_store_basic(store):
    assert len(store) == 6
    assert len(store.get_samples("bedroom")) == 4
    assert len(store.get_samples("study")) == 2


def test_out_of_order_insert_keeps_time_order(store):
    store.add_sample(_sample("bedroom", 4000, -99.0))
    timestamps = [s.timestamp for s in store.get_samples("bedroom")]
    assert timestamps == sorted(timestamps)
    assert store.get_samples("bedroom", 4000, 4000)[0].rssi == -99.0


def test_range_queries(store):
    assert [s.timestamp for s in store.get_samples("bedroom", 3000, 5000)] == [3000, 5000]
    assert [s.timestamp for s in store.get_samples("bedroom", 3000, 4999)] == [3000]
    assert store.get_samples("hallway") == []
    assert store.get_values("study").tolist() == [-80.0, -80.0]


def test_nearest_picks_closest_sample(store):
    assert store.nearest("bedroom", 1800, 30000).timestamp == 1000
    assert store.nearest("bedroom", 3000, 30000).timestamp == 3000
    # Equidistant: the earlier sample wins
    assert store.nearest("bedroom", 2000, 30000).timestamp == 1000


def test_nearest_not_after_ignores_later_samples(store):
    assert store.nearest("bedroom", 2900, 30000, not_after=2900).timestamp == 1000
    assert store.nearest("bedroom", 2900, 30000).timestamp == 3000


def test_nearest_staleness(store):
    with pytest.raises(StalenessError) as excinfo:
        store.nearest("study", 40000, 30000)
    assert excinfo.value.beacon_id == "study"
    with pytest.raises(StalenessError):
        store.nearest("hallway", 1000, 30000)


def test_rssi_stats(store):
    stats = store.get_rssi_stats("bedroom")
    assert stats["count"] == 4
    assert stats["mean"] == pytest.approx(-71.5)
    assert stats["min"] == -73.0 and stats["max"] == -70.0
    assert store.get_rssi_stats("hallway")["count"] == 0


def test_rssi_stats_over_a_range(store):
    stats = store.get_rssi_stats("bedroom", 3000, 5000)
    assert stats["count"] == 2
    assert stats["p50"] == pytest.approx(-71.5)


def test_trace_csv_round_trip(tmp_path, samples):
    path = tmp_path / "trace.csv"
    count = write_trace_csv(samples, str(path))
    assert count == 6
    assert read_trace_csv(str(path)) == samples


def test_trace_csv_errors_name_the_row(tmp_path):
    header = "timestamp_ms,beacon_id,target_id,rssi_dbm\n"
    path = tmp_path / "trace.csv"

    path.write_text(header + "1000,b1,target,-70\n2000,b1,target,oops\n")
    with pytest.raises(FormatError) as excinfo:
        read_trace_csv(str(path))
    assert excinfo.value.row == 3

    path.write_text(header + "2000,b1,target,-70\n1000,b1,target,-71\n")
    with pytest.raises(FormatError) as excinfo:
        read_trace_csv(str(path))
    assert excinfo.value.row == 3

    path.write_text("time,beacon,rssi\n")
    with pytest.raises(FormatError) as excinfo:
        read_trace_csv(str(path))
    assert excinfo.value.row == 1


def test_truth_csv_round_trip(tmp_path):
    intervals = [GroundTruthInterval(0, 900000, Position(1.6, 0.95)),
                 GroundTruthInterval(960000, 1860000, Position(0.55, 3.79))]
    path = tmp_path / "truth.csv"
    write_truth_csv(intervals, str(path))
    assert read_truth_csv(str(path)) == intervals
