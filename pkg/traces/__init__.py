#!/usr/bin/env python3
"""
Traces package for the localization toolkit.
Provides a per-beacon, time-indexed store of RSSI samples and the trace/truth CSV formats.
"""

from .trace_store import TraceStore
from .trace_io import (
    TRACE_HEADER,
    TRUTH_HEADER,
    read_trace_csv,
    write_trace_csv,
    read_truth_csv,
    write_truth_csv,
)

__all__ = [
    'TraceStore',
    'TRACE_HEADER',
    'TRUTH_HEADER',
    'read_trace_csv',
    'write_trace_csv',
    'read_truth_csv',
    'write_truth_csv',
]
