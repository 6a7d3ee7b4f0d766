#!/usr/bin/env python3
"""
Exception hierarchy for the localization toolkit.
"""
from typing import Optional


class LocalizationError(Exception):
    """Base class for every error raised by the library."""


class InputError(LocalizationError, ValueError):
    """Invalid argument: non-finite value, empty sequence, out-of-range parameter."""


class GeometryError(LocalizationError):
    """Anchor layout cannot constrain a 2D position (collinear or degenerate)."""


class StalenessError(LocalizationError):
    """No sample from a beacon close enough to the requested moment."""

    def __init__(self, beacon_id: str, at: int, max_staleness: int):
        self.beacon_id = beacon_id
        self.at = at
        self.max_staleness = max_staleness
        super().__init__(
            f"beacon {beacon_id!r} has no sample within {max_staleness} ms of t={at}"
        )


class FormatError(LocalizationError):
    """A scenario, trace, dataset or model file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, row: Optional[int] = None):
        self.path = path
        self.row = row
        where = ""
        if path is not None:
            where = f"{path}"
            if row is not None:
                where += f", row {row}"
            where += ": "
        super().__init__(f"{where}{message}")


class ConfigError(LocalizationError):
    """Bad configuration file or value."""


class KinkProximityError(LocalizationError):
    """A ReLU pre-activation sits too close to zero for finite differences; perturb and retry."""
