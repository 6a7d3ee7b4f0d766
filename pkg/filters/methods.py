#!/usr/bin/env python3
"""
Localization method specs: which stream transform runs before trilateration.

Textual form, as accepted on the command line:
    raw | kalman | lookback:K[:minmax|iqr] | hybrid:K[:minmax|iqr]
"""
import enum
from dataclasses import dataclass
from typing import List, Optional, Sequence

from errors import InputError
from .hybrid import hybrid_stream
from .kalman import kalman_run
from .lookback import LookbackConfig, OutlierMode, lookback_stream


class MethodKind(enum.Enum):
    RAW = "raw"
    LOOKBACK = "lookback"
    KALMAN = "kalman"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Method:
    kind: MethodKind
    lookback: Optional[LookbackConfig] = None
    q: float = 0.05
    r: float = 4.0

    def __post_init__(self):
        needs_window = self.kind in (MethodKind.LOOKBACK, MethodKind.HYBRID)
        if needs_window and self.lookback is None:
            raise InputError(f"method {self.kind.value} needs a look-back configuration")

    @classmethod
    def parse(cls, spec: str, default_mode=OutlierMode.MIN_MAX,
              q: float = 0.05, r: float = 4.0) -> "Method":
        parts = [p.strip().lower() for p in str(spec).split(":")]
        try:
            kind = MethodKind(parts[0])
        except ValueError:
            raise InputError(f"unknown method {spec!r} (expected raw, kalman, lookback:K, hybrid:K)")

        if kind in (MethodKind.RAW, MethodKind.KALMAN):
            if len(parts) != 1:
                raise InputError(f"method {kind.value} takes no parameters: {spec!r}")
            return cls(kind, None, q, r)

        if len(parts) not in (2, 3):
            raise InputError(f"method {kind.value} needs a window size, e.g. {kind.value}:5")
        try:
            k = int(parts[1])
        except ValueError:
            raise InputError(f"window size must be an integer in {spec!r}")
        mode = OutlierMode.parse(parts[2]) if len(parts) == 3 else OutlierMode.parse(default_mode)
        return cls(kind, LookbackConfig(k, mode), q, r)

    @property
    def label(self) -> str:
        """Row label in the comparison table."""
        if self.kind is MethodKind.RAW:
            return "Raw values"
        if self.kind is MethodKind.KALMAN:
            return "Kalman filter"
        suffix = " (IQR)" if self.lookback.outlier_mode is OutlierMode.IQR else ""
        if self.kind is MethodKind.LOOKBACK:
            return f"Look-back-{self.lookback.k}{suffix}"
        return f"Kalman filter + look-back-{self.lookback.k}{suffix}"

    @property
    def tag(self) -> str:
        """Short textual form, parseable by Method.parse."""
        if self.lookback is None:
            return self.kind.value
        return f"{self.kind.value}:{self.lookback.k}:{self.lookback.outlier_mode.value}"

    def apply(self, values: Sequence[float]) -> List[float]:
        """Run the stream transform over one beacon's time-ordered values."""
        if self.kind is MethodKind.RAW:
            return [float(v) for v in values]
        if self.kind is MethodKind.KALMAN:
            return kalman_run(values, self.q, self.r)
        if self.kind is MethodKind.LOOKBACK:
            return lookback_stream(values, self.lookback)
        return hybrid_stream(values, self.q, self.r, self.lookback)


def parse_methods(text: str, default_mode=OutlierMode.MIN_MAX,
                  q: float = 0.05, r: float = 4.0) -> List[Method]:
    """Parse a comma-separated method list, keeping its order."""
    specs = [s for s in (part.strip() for part in str(text).split(",")) if s]
    if not specs:
        raise InputError("method list is empty")
    return [Method.parse(s, default_mode, q, r) for s in specs]
