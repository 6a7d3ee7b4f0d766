#!/usr/bin/env python3
"""
Utility functions for the localization toolkit.
"""
import hashlib
import logging
from typing import Iterable, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

SeedKey = Union[int, str]


def _key_to_int(key: SeedKey) -> int:
    if isinstance(key, int):
        return key
    # Stable across processes, unlike hash()
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_seed(seed: int, *keys: SeedKey) -> int:
    """
    Derive an independent sub-seed from a root seed and a path of keys.

    The splitter is numpy's SeedSequence: the root seed is the entropy and the
    keys form the spawn key, so derive_seed(s, "fold", 3) is the same value no
    matter which worker computes it or in which order.
    """
    spawn_key: Tuple[int, ...] = tuple(_key_to_int(k) for k in keys)
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=spawn_key)
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int, *keys: SeedKey) -> np.random.Generator:
    """Seeded generator for the given key path."""
    return np.random.default_rng(derive_seed(seed, *keys))


def format_cm(meters, decimal_places=2):
    """Format a length given in meters as centimetres"""
    return f"{float(meters) * 100.0:.{decimal_places}f}"


def format_mean_std(mean_cm, std_cm, decimal_places=2):
    """Format a mean ± std pair already in centimetres"""
    return f"{float(mean_cm):.{decimal_places}f} ± {float(std_cm):.{decimal_places}f}"


def format_interval_label(t_start_ms, t_end_ms, origin_ms=0):
    """Format an interval as H:MM-H:MM offsets from origin"""
    def hm(t):
        minutes = int(round((t - origin_ms) / 60000.0))
        return f"{minutes // 60}:{minutes % 60:02d}"
    return f"{hm(t_start_ms)}-{hm(t_end_ms)}"


def parse_int_list(text: str) -> Tuple[int, ...]:
    """Parse "1,2,3" into (1, 2, 3); raises ValueError on bad items"""
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise ValueError(f"empty list: {text!r}")
    values = tuple(int(item) for item in items)
    if any(v < 1 for v in values):
        raise ValueError(f"list items must be positive: {text!r}")
    return values


def float_range(start: float, stop: float, step: float) -> Iterable[float]:
    """Inclusive float range rounded to the step's decimals (no 2.5000000001)"""
    decimals = max(0, -int(np.floor(np.log10(step)))) if step < 1 else 0
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, decimals + 1) for i in range(count)]
