#!/usr/bin/env python3
"""
Configuration module for the localization toolkit.
"""
import json
import logging
import sys
import os
from datetime import datetime

from errors import ConfigError

# Default settings with environment variable support
DEFAULT_SEED = int(os.environ.get("LOC_SEED", "1"))
DEFAULT_SIGMA_DB = float(os.environ.get("LOC_SIGMA_DB", "4.0"))
DEFAULT_SAMPLE_PERIOD_MS = int(os.environ.get("LOC_SAMPLE_PERIOD_MS", "8000"))
DEFAULT_JITTER_MS = int(os.environ.get("LOC_JITTER_MS", "1000"))

# Filter settings
DEFAULT_KALMAN_Q = float(os.environ.get("LOC_KALMAN_Q", "0.05"))  # dBm^2 per step
DEFAULT_KALMAN_R = float(os.environ.get("LOC_KALMAN_R", "4.0"))   # dBm^2
DEFAULT_LOOKBACK_K = int(os.environ.get("LOC_LOOKBACK_K", "5"))
DEFAULT_OUTLIER_MODE = os.environ.get("LOC_OUTLIER_MODE", "minmax").lower()

# Evaluation settings
DEFAULT_EVAL_PERIOD_MS = int(os.environ.get("LOC_EVAL_PERIOD_MS", "10000"))
DEFAULT_MAX_STALENESS_MS = int(os.environ.get("LOC_MAX_STALENESS_MS", "30000"))
DEFAULT_METHODS = os.environ.get(
    "LOC_METHODS",
    "raw,lookback:5,lookback:10,lookback:15,lookback:20,lookback:30,lookback:50,"
    "kalman,hybrid:5,hybrid:10,hybrid:15,hybrid:20,hybrid:30,hybrid:50",
)

# Neural network settings
DEFAULT_HIDDEN_LAYERS = int(os.environ.get("LOC_HIDDEN_LAYERS", "3"))
DEFAULT_NEURONS = int(os.environ.get("LOC_NEURONS", "32"))
DEFAULT_EPOCHS = int(os.environ.get("LOC_EPOCHS", "1000"))
DEFAULT_LEARNING_RATE = float(os.environ.get("LOC_LEARNING_RATE", "1e-3"))
DEFAULT_BATCH_SIZE = int(os.environ.get("LOC_BATCH_SIZE", "32"))
DEFAULT_FOLDS = int(os.environ.get("LOC_FOLDS", "10"))
DEFAULT_DATASET_TICK_MS = int(os.environ.get("LOC_DATASET_TICK_MS", "8000"))

# Sweep grid (rows: epochs, columns: hidden layers)
DEFAULT_SWEEP_EPOCHS = os.environ.get("LOC_SWEEP_EPOCHS", "100,500,1000,2000,3000")
DEFAULT_SWEEP_LAYERS = os.environ.get("LOC_SWEEP_LAYERS", "1,2,3,4,5")

# Worker pool size for grid searches, folds and sweep cells
DEFAULT_WORKERS = int(os.environ.get("LOC_WORKERS", str(min(4, os.cpu_count() or 1))))

# Logging settings
LOG_TO_FILE = os.environ.get("LOG_TO_FILE", "").lower() == "true"
LOG_DIR = os.environ.get("LOG_DIR", "logs")


def load_config_file(path, allowed_keys=None):
    """
    Load a JSON config file whose keys mirror CLI flag names.

    Dashes in keys are accepted and mapped to underscores ("max-staleness" ->
    "max_staleness").

    Args:
        path: Path of the JSON file
        allowed_keys: Optional collection of accepted keys

    Returns:
        dict of settings
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e.msg} (line {e.lineno})") from e

    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")

    settings = {str(key).replace("-", "_"): value for key, value in data.items()}
    if allowed_keys is not None:
        unknown = sorted(set(settings) - set(allowed_keys))
        if unknown:
            raise ConfigError(f"unknown keys in config file {path}: {', '.join(unknown)}")
    return settings


# Configure logging
def setup_logging(level=None):
    """Set up logging configuration"""
    if level is None:
        level = logging.DEBUG if os.environ.get("DEBUG", "").lower() == "true" else logging.INFO

    handlers = [logging.StreamHandler(sys.stdout)]

    if LOG_TO_FILE:
        os.makedirs(LOG_DIR, exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_file = f"{LOG_DIR}/localization_{timestamp}.log"

        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
        handlers.append(file_handler)

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers
    )

    logger = logging.getLogger(__name__)
    if LOG_TO_FILE:
        logger.info(f"Logging to file: {log_file}")

    return logger
