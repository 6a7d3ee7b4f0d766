#!/usr/bin/env python3
"""
Locnet package for the localization toolkit.
A small numpy feedforward network from RSSI triples to positions, with
stratified cross validation and dataset files.
"""

from .dataset import (
    Dataset,
    DATASET_HEADER,
    CALIBRATION_HEADER,
    dataset_from_trace,
    read_dataset_csv,
    write_dataset_csv,
    read_calibration_csv,
)
from .mlp import (
    MlpConfig,
    Mlp,
    train,
    analytic_gradients,
    numeric_gradients,
    gradient_check,
)
from .kfold import (
    SweepResult,
    stratified_folds,
    cross_validate,
    stratified_kfold_eval,
    mean_error,
    sweep,
    render_sweep_markdown,
    render_sweep_csv,
)

__all__ = [
    'Dataset', 'DATASET_HEADER', 'CALIBRATION_HEADER', 'dataset_from_trace',
    'read_dataset_csv', 'write_dataset_csv', 'read_calibration_csv',
    'MlpConfig', 'Mlp', 'train', 'analytic_gradients', 'numeric_gradients', 'gradient_check',
    'SweepResult', 'stratified_folds', 'cross_validate', 'stratified_kfold_eval',
    'mean_error', 'sweep', 'render_sweep_markdown', 'render_sweep_csv',
]
