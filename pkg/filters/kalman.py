#!/usr/bin/env python3
"""
Scalar Kalman filter for RSSI streams.

Constant-state (random walk) model per beacon: the prediction keeps the
estimate and grows the error covariance by q; the update blends in the new
measurement with gain error_cov / (error_cov + r).
"""
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

from errors import InputError


@dataclass(frozen=True)
class KalmanState:
    estimate: float             # dBm
    error_cov: float            # dBm^2
    process_noise_q: float      # dBm^2 per step
    measurement_noise_r: float  # dBm^2

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise InputError(f"estimate must be finite, got {self.estimate}")
        if not self.error_cov >= 0:
            raise InputError(f"error_cov must be >= 0, got {self.error_cov}")
        if not self.process_noise_q > 0:
            raise InputError(f"q must be > 0, got {self.process_noise_q}")
        if not self.measurement_noise_r > 0:
            raise InputError(f"r must be > 0, got {self.measurement_noise_r}")


def kalman_gain(state: KalmanState) -> float:
    """Gain the next update would apply."""
    predicted_cov = state.error_cov + state.process_noise_q
    return predicted_cov / (predicted_cov + state.measurement_noise_r)


def kalman_step(state: KalmanState, measurement: float) -> KalmanState:
    """One predict + update cycle."""
    if not math.isfinite(measurement):
        raise InputError(f"measurement must be finite, got {measurement!r}")

    # Predict
    predicted_cov = state.error_cov + state.process_noise_q

    # Update
    gain = predicted_cov / (predicted_cov + state.measurement_noise_r)
    estimate = state.estimate + gain * (measurement - state.estimate)
    return replace(state, estimate=estimate, error_cov=predicted_cov * (1.0 - gain))


def kalman_run(measurements: Sequence[float], q: float, r: float,
               init_cov: Optional[float] = None) -> List[float]:
    """
    Filter a time-ordered stream; the first estimate is the first measurement.

    Args:
        measurements: RSSI values in dBm
        q: process noise
        r: measurement noise
        init_cov: error covariance after initialization (default: r)
    """
    if len(measurements) == 0:
        raise InputError("kalman_run needs at least one measurement")
    first = float(measurements[0])
    if not math.isfinite(first):
        raise InputError(f"measurement must be finite, got {first!r}")

    state = KalmanState(first, r if init_cov is None else init_cov, q, r)
    estimates = [state.estimate]
    for measurement in measurements[1:]:
        state = kalman_step(state, float(measurement))
        estimates.append(state.estimate)
    return estimates
