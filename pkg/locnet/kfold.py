#!/usr/bin/env python3
"""
Stratified k-fold cross validation and the hidden-layers x epochs sweep.
"""
import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sklearn.model_selection import StratifiedKFold

from errors import InputError
from utils import derive_seed, format_mean_std
from .dataset import Dataset
from .mlp import MlpConfig, train

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 10
CONFIDENCE_Z = 1.96


def stratified_folds(labels: Sequence[str], folds: int, seed: int = 1) -> List[np.ndarray]:
    """
    Validation index sets for each fold, from a shuffled StratifiedKFold.

    Every label is spread over the folds as evenly as its count allows.

    Raises:
        InputError: folds < 2, or a label with fewer than `folds` samples
    """
    if folds < 2:
        raise InputError(f"folds must be >= 2, got {folds}")
    counts: Dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    for label in sorted(counts):
        if counts[label] < folds:
            raise InputError(f"label {label!r} has {counts[label]} samples, "
                             f"fewer than {folds} folds")

    splitter = StratifiedKFold(n_splits=folds, shuffle=True,
                               random_state=derive_seed(seed, "stratified-split") % (2 ** 32))
    y = np.asarray(labels)
    return [np.sort(held_out) for _, held_out in splitter.split(np.zeros((len(y), 1)), y)]


def mean_error(model, dataset: Dataset) -> float:
    """Mean Euclidean error in meters of a model on a dataset."""
    predictions = model.predict(dataset.inputs)
    return float(np.mean(np.hypot(*(predictions - dataset.targets).T)))


def cross_validate(dataset: Dataset, config: MlpConfig, folds: int = DEFAULT_FOLDS,
                   workers: int = 1) -> List[float]:
    """Held-out mean error (m) of each fold, in fold order."""
    validation_sets = stratified_folds(dataset.labels, folds, config.seed)
    all_indices = np.arange(len(dataset))

    def run_fold(fold: int) -> float:
        held_out = validation_sets[fold]
        training = np.setdiff1d(all_indices, held_out)
        fold_config = replace(config, seed=derive_seed(config.seed, "fold", fold) % (2 ** 63))
        model = train(dataset.subset(training), fold_config)
        error = mean_error(model, dataset.subset(held_out))
        logger.debug(f"fold {fold + 1}/{folds}: {error * 100:.2f} cm on {len(held_out)} samples")
        return error

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_fold, range(folds)))
    return [run_fold(f) for f in range(folds)]


def stratified_kfold_eval(dataset: Dataset, config: MlpConfig, folds: int = DEFAULT_FOLDS,
                          workers: int = 1) -> Tuple[float, float]:
    """
    Mean and standard deviation, in centimetres, of the per-fold held-out error.

    Each fold trains with its own seed derived from config.seed, so the result
    does not depend on `workers`.
    """
    errors_cm = np.array(cross_validate(dataset, config, folds, workers)) * 100.0
    mean_cm, std_cm = float(np.mean(errors_cm)), float(np.std(errors_cm))
    logger.info(f"{folds}-fold CV ({config.hidden_layers} layers, {config.epochs} epochs): "
                f"{mean_cm:.2f} ± {std_cm:.2f} cm")
    return mean_cm, std_cm


@dataclass(frozen=True)
class SweepResult:
    epochs: Tuple[int, ...]
    layers: Tuple[int, ...]
    cells: Dict[Tuple[int, int], Tuple[float, float]]    # (epochs, layers) -> (mean cm, std cm)

    def summary(self) -> Tuple[float, float]:
        """Mean over all cells and the 95 % confidence half-width of that mean."""
        means = np.array([self.cells[(e, l)][0] for e in self.epochs for l in self.layers])
        if len(means) < 2:
            return float(means.mean()), 0.0
        return float(means.mean()), CONFIDENCE_Z * float(means.std(ddof=1)) / math.sqrt(len(means))


def sweep(dataset: Dataset, base_config: MlpConfig, epochs: Sequence[int],
          layers: Sequence[int], folds: int = DEFAULT_FOLDS, workers: int = 1) -> SweepResult:
    """Cross-validate every (epochs, hidden layers) cell; cells run in the worker pool."""
    grid = [(e, l) for e in epochs for l in layers]
    configs = [replace(base_config, epochs=e, hidden_layers=l) for e, l in grid]

    def run_cell(config: MlpConfig) -> Tuple[float, float]:
        return stratified_kfold_eval(dataset, config, folds)

    logger.info(f"Sweeping {len(epochs)} x {len(layers)} grid with {folds} folds per cell")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, configs))
    else:
        results = [run_cell(c) for c in configs]
    return SweepResult(tuple(epochs), tuple(layers), dict(zip(grid, results)))


def render_sweep_markdown(result: SweepResult, title: str = "") -> str:
    """Epochs down the rows, hidden layers across the columns, mean ± std in cm."""
    lines = []
    if title:
        lines += [f"### {title}", ""]
    lines.append("| Epochs | " + " | ".join(f"{l} hidden" for l in result.layers) + " |")
    lines.append("|" + "|".join(["---"] + ["---:"] * len(result.layers)) + "|")
    for e in result.epochs:
        cells = [format_mean_std(*result.cells[(e, l)]) for l in result.layers]
        lines.append(f"| {e} | " + " | ".join(cells) + " |")
    mean_cm, half_width = result.summary()
    lines += ["", f"Mean over all cells: {format_mean_std(mean_cm, half_width)} cm (95 % confidence)"]
    return "\n".join(lines) + "\n"


def render_sweep_csv(result: SweepResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["epochs", "hidden_layers", "mean_cm", "std_cm"])
    for e in result.epochs:
        for l in result.layers:
            mean_cm, std_cm = result.cells[(e, l)]
            writer.writerow([e, l, f"{mean_cm:.2f}", f"{std_cm:.2f}"])
    return buffer.getvalue()
