#!/usr/bin/env python3
"""
Simulator package for the localization toolkit.
Synthetic RSSI traces from a scenario, plus the builtin home and office sites.
"""

from .generator import NoiseModel, simulate, expected_rssi, wall_loss, segments_intersect
from .scenarios import builtin_scenarios, home_scenario, office_scenario, INTERVAL_MS

__all__ = [
    'NoiseModel', 'simulate', 'expected_rssi', 'wall_loss', 'segments_intersect',
    'builtin_scenarios', 'home_scenario', 'office_scenario', 'INTERVAL_MS',
]
