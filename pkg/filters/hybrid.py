#!/usr/bin/env python3
"""
Hybrid filter: Kalman estimates first, then look-back-k over the estimates.
"""
from typing import List, Optional, Sequence

from .kalman import kalman_run
from .lookback import LookbackConfig, lookback_stream


def hybrid_stream(samples: Sequence[float], q: float, r: float,
                  lookback_config: LookbackConfig,
                  init_cov: Optional[float] = None) -> List[float]:
    return lookback_stream(kalman_run(samples, q, r, init_cov=init_cov), lookback_config)
