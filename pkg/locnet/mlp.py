#!/usr/bin/env python3
"""
Feedforward network mapping an RSSI triple to (x, y).

Affine -> ReLU for every hidden layer, linear output layer of width 2. Inputs
are standardized with the training-set mean and standard deviation stored in
the model. Training minimizes the mean over the batch of the squared error
summed over both coordinates, with Adam on shuffled mini-batches.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core import Position
from errors import FormatError, InputError, KinkProximityError
from .dataset import Dataset

logger = logging.getLogger(__name__)

N_OUTPUTS = 2
MAX_HIDDEN_LAYERS = 5


@dataclass(frozen=True)
class MlpConfig:
    hidden_layers: int = 3
    neurons_per_layer: int = 32
    epochs: int = 1000
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 1
    batch_size: int = 32

    def __post_init__(self):
        if not 1 <= self.hidden_layers <= MAX_HIDDEN_LAYERS:
            raise InputError(f"hidden_layers must be in [1, {MAX_HIDDEN_LAYERS}], got {self.hidden_layers}")
        for name in ("neurons_per_layer", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("learning_rate", "adam_epsilon"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("adam_beta1", "adam_beta2"):
            if not 0 < getattr(self, name) < 1:
                raise InputError(f"{name} must be in (0, 1), got {getattr(self, name)}")

    def layer_sizes(self, n_inputs: int) -> List[int]:
        return [n_inputs] + [self.neurons_per_layer] * self.hidden_layers + [N_OUTPUTS]


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


class Mlp:
    """
    Network parameters plus the input standardization constants.

    weights[l] has shape (fan_in, fan_out) so a layer computes a @ W + b.
    """

    def __init__(self, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray],
                 input_mean: np.ndarray, input_std: np.ndarray,
                 config: Optional[MlpConfig] = None):
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        self.input_mean = np.array(input_mean, dtype=float)
        self.input_std = np.array(input_std, dtype=float)
        self.config = config
        self.loss_history: List[float] = []

        if len(self.weights) != len(self.biases) or not self.weights:
            raise InputError("weights and biases must be non-empty and of equal length")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise InputError(f"inconsistent layer shapes {w.shape} / {b.shape}")
        for prev, cur in zip(self.weights, self.weights[1:]):
            if prev.shape[1] != cur.shape[0]:
                raise InputError(f"layer shapes do not chain: {prev.shape} -> {cur.shape}")
        if np.any(self.input_std <= 0):
            raise InputError("input_std must be positive")

    @classmethod
    def initialize(cls, layer_sizes: Sequence[int], rng: np.random.Generator,
                   input_mean: np.ndarray, input_std: np.ndarray,
                   config: Optional[MlpConfig] = None) -> "Mlp":
        """He initialization: weights ~ N(0, 2 / fan_in), zero biases."""
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
            weights.append(rng.standard_normal((fan_in, fan_out)) * math.sqrt(2.0 / fan_in))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, input_mean, input_std, config)

    @classmethod
    def zeros(cls, layer_sizes: Sequence[int]) -> "Mlp":
        n_inputs = layer_sizes[0]
        weights = [np.zeros((a, b)) for a, b in zip(layer_sizes, layer_sizes[1:])]
        biases = [np.zeros(b) for b in layer_sizes[1:]]
        return cls(weights, biases, np.zeros(n_inputs), np.ones(n_inputs))

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[0]

    @property
    def parameters(self) -> List[np.ndarray]:
        """Parameter arrays in a fixed order: W0, b0, W1, b1, ..."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params += [w, b]
        return params

    def standardize(self, inputs: np.ndarray) -> np.ndarray:
        return (np.asarray(inputs, dtype=float) - self.input_mean) / self.input_std

    def forward_standardized(self, xs: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
        """
        Forward pass on standardized inputs of shape (batch, n_inputs).

        Returns:
            (outputs, activations, pre_activations); activations[0] is the input
        """
        activations = [xs]
        pre_activations = []
        a = xs
        last = len(self.weights) - 1
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            pre_activations.append(z)
            a = z if l == last else relu(z)
            activations.append(a)
        return a, activations, pre_activations

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        """(batch, n_inputs) raw RSSI -> (batch, 2) coordinates in meters."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        if not np.all(np.isfinite(inputs)):
            raise InputError("network input must be finite")
        outputs, _, _ = self.forward_standardized(self.standardize(inputs))
        return outputs

    def forward(self, rssi: Sequence[float]) -> Position:
        """Single RSSI triple -> Position."""
        x, y = self.predict(np.asarray(rssi, dtype=float).reshape(1, -1))[0]
        return Position(float(x), float(y))

    def loss_and_gradients(self, xs: np.ndarray, targets: np.ndarray) -> Tuple[float, List[np.ndarray]]:
        """
        Batch loss mean_b sum_c (y_hat - y)^2 and its gradients, on standardized inputs.

        Gradients follow the order of `parameters`.
        """
        outputs, activations, pre_activations = self.forward_standardized(xs)
        diff = outputs - targets
        batch = xs.shape[0]
        loss = float(np.sum(diff * diff) / batch)

        delta = 2.0 * diff / batch
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.weights)
        for l in range(len(self.weights) - 1, -1, -1):
            grads_w[l] = activations[l].T @ delta
            grads_b[l] = delta.sum(axis=0)
            if l > 0:
                delta = (delta @ self.weights[l].T) * (pre_activations[l - 1] > 0)

        grads = []
        for gw, gb in zip(grads_w, grads_b):
            grads += [gw, gb]
        return loss, grads

    def loss(self, inputs: np.ndarray, targets: np.ndarray) -> float:
        """Loss on raw (unstandardized) inputs."""
        outputs = self.predict(inputs)
        diff = outputs - np.asarray(targets, dtype=float)
        return float(np.sum(diff * diff) / diff.shape[0])

    # Serialization

    def to_dict(self) -> Dict:
        return {
            "layers": [
                {"shape": list(w.shape), "weights": w.tolist(), "bias": b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
            "input_mean": self.input_mean.tolist(),
            "input_std": self.input_std.tolist(),
            "config": asdict(self.config) if self.config is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Mlp":
        weights, biases = [], []
        for layer in data["layers"]:
            w = np.array(layer["weights"], dtype=float).reshape(layer["shape"])
            weights.append(w)
            biases.append(np.array(layer["bias"], dtype=float))
        config = MlpConfig(**data["config"]) if data.get("config") else None
        return cls(weights, biases, data["input_mean"], data["input_std"], config)

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f)
            f.write("\n")
        logger.info(f"Saved model ({len(self.weights) - 1} hidden layers) to {path}")

    @classmethod
    def load(cls, path: str) -> "Mlp":
        try:
            with open(path, "r") as f:
                data = json.load(f)
            return cls.from_dict(data)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON ({e.msg} at line {e.lineno})", path=path) from e
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"malformed model file: {e}", path=path) from e


def _standardization(inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = inputs.mean(axis=0)
    std = inputs.std(axis=0)
    # Constant features carry no information; leave them centered only
    std = np.where(std > 0, std, 1.0)
    return mean, std


def train(dataset: Dataset, config: MlpConfig) -> Mlp:
    """
    Train a network on a dataset.

    All randomness (initial weights, per-epoch shuffles) comes from one
    generator seeded with config.seed.
    """
    if len(dataset) < 2:
        raise InputError(f"training needs at least 2 samples, got {len(dataset)}")

    rng = np.random.default_rng(config.seed)
    mean, std = _standardization(dataset.inputs)
    model = Mlp.initialize(config.layer_sizes(dataset.inputs.shape[1]), rng, mean, std, config)

    xs = model.standardize(dataset.inputs)
    ys = dataset.targets
    n = len(dataset)

    params = model.parameters
    first_moment = [np.zeros_like(p) for p in params]
    second_moment = [np.zeros_like(p) for p in params]
    beta1, beta2, eps, lr = config.adam_beta1, config.adam_beta2, config.adam_epsilon, config.learning_rate
    step = 0
    report_every = max(1, config.epochs // 10)

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            _, grads = model.loss_and_gradients(xs[batch], ys[batch])
            step += 1
            correction1 = 1.0 - beta1 ** step
            correction2 = 1.0 - beta2 ** step
            for p, g, m, v in zip(params, grads, first_moment, second_moment):
                m *= beta1
                m += (1.0 - beta1) * g
                v *= beta2
                v += (1.0 - beta2) * g * g
                p -= lr * (m / correction1) / (np.sqrt(v / correction2) + eps)

        epoch_loss, _ = model.loss_and_gradients(xs, ys)
        model.loss_history.append(epoch_loss)
        if epoch % report_every == 0:
            logger.debug(f"epoch {epoch}/{config.epochs}: training loss {epoch_loss:.6g}")

    logger.info(f"Trained {config.hidden_layers}x{config.neurons_per_layer} network for "
                f"{config.epochs} epochs on {n} samples (final loss {model.loss_history[-1]:.6g})")
    return model


# Gradient verification

def analytic_gradients(model: Mlp, rssi: Sequence[float], target: Sequence[float]) -> List[np.ndarray]:
    xs = model.standardize(np.asarray(rssi, dtype=float).reshape(1, -1))
    _, grads = model.loss_and_gradients(xs, np.asarray(target, dtype=float).reshape(1, -1))
    return grads


def numeric_gradients(model: Mlp, rssi: Sequence[float], target: Sequence[float],
                      step: float = 1e-5) -> List[np.ndarray]:
    """Central finite differences of the single-sample loss for every parameter."""
    xs = model.standardize(np.asarray(rssi, dtype=float).reshape(1, -1))
    ys = np.asarray(target, dtype=float).reshape(1, -1)

    def loss() -> float:
        outputs, _, _ = model.forward_standardized(xs)
        diff = outputs - ys
        return float(np.sum(diff * diff))

    grads = []
    for p in model.parameters:
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            original = p[idx]
            p[idx] = original + step
            plus = loss()
            p[idx] = original - step
            minus = loss()
            p[idx] = original
            g[idx] = (plus - minus) / (2.0 * step)
        grads.append(g)
    return grads


def gradient_check(model: Mlp, rssi: Sequence[float], target: Sequence[float],
                   step: float = 1e-5, kink_margin: float = 1e-6,
                   abs_floor: float = 1e-6) -> float:
    """
    Max relative error between backpropagated and finite-difference gradients.

    Relative error is |a - n| / max(|a|, |n|, abs_floor).

    Raises:
        KinkProximityError: a hidden pre-activation lies within kink_margin of zero
    """
    xs = model.standardize(np.asarray(rssi, dtype=float).reshape(1, -1))
    _, _, pre_activations = model.forward_standardized(xs)
    for z in pre_activations[:-1]:
        if np.any(np.abs(z) < kink_margin):
            raise KinkProximityError(
                f"pre-activation within {kink_margin} of the ReLU kink; perturb the input and retry"
            )

    worst = 0.0
    for a, n in zip(analytic_gradients(model, rssi, target),
                    numeric_gradients(model, rssi, target, step)):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), abs_floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
