#!/usr/bin/env python3
"""
Filters package for the localization toolkit.
RSSI stream smoothing applied per beacon before trilateration.
"""

from .kalman import KalmanState, kalman_gain, kalman_step, kalman_run
from .lookback import LookbackConfig, OutlierMode, lookback_reduce, lookback_stream
from .hybrid import hybrid_stream
from .methods import Method, MethodKind, parse_methods

__all__ = [
    'KalmanState', 'kalman_gain', 'kalman_step', 'kalman_run',
    'LookbackConfig', 'OutlierMode', 'lookback_reduce', 'lookback_stream',
    'hybrid_stream',
    'Method', 'MethodKind', 'parse_methods',
]
