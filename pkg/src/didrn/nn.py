"""Dense-layer numerical core.

Forward evaluation, hand-written reverse-mode gradients, MSE loss and the
SGD/Adam optimizers. Everything is float64 so finite-difference checks are
meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import DataError, DimensionError, NumericError

ACTIVATIONS = ("tanh", "linear")


@dataclass
class DenseLayer:
    """Fully connected layer ``activation(W @ x + b)``.

    ``weights`` has shape (out_dim, in_dim), ``bias`` shape (out_dim,).
    """

    weights: np.ndarray
    bias: np.ndarray
    activation: str = "tanh"

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=np.float64, ndmin=2)
        self.bias = np.array(self.bias, dtype=np.float64).reshape(-1)
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.bias.shape[0] != self.weights.shape[0]:
            raise DimensionError("bias", self.weights.shape[0], self.bias.shape[0])

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.weights.copy(), self.bias.copy(), self.activation)


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return np.tanh(z)
    return z


def layer_forward(layer: DenseLayer, inputs: np.ndarray) -> np.ndarray:
    """Batched forward pass: ``inputs`` is (batch, in_dim)."""
    if inputs.shape[-1] != layer.in_dim:
        raise DimensionError("layer input", layer.in_dim, inputs.shape[-1])
    return _activate(inputs @ layer.weights.T + layer.bias, layer.activation)


def dense_forward(layer: DenseLayer, x) -> np.ndarray:
    """Evaluate a single layer on one input vector."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return layer_forward(layer, x[None, :])[0]


def layer_backward(
    layer: DenseLayer, inputs: np.ndarray, outputs: np.ndarray, grad_out: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Backpropagate through one layer.

    Args:
        layer: the layer evaluated in the forward pass.
        inputs: cached layer inputs, (batch, in_dim).
        outputs: cached layer outputs, (batch, out_dim).
        grad_out: dL/d(outputs).

    Returns:
        (dL/dW, dL/db, dL/d(inputs))
    """
    if layer.activation == "tanh":
        grad_z = grad_out * (1.0 - outputs * outputs)
    else:
        grad_z = grad_out
    grad_w = grad_z.T @ inputs
    grad_b = grad_z.sum(axis=0)
    grad_in = grad_z @ layer.weights
    return grad_w, grad_b, grad_in


def mse_loss(pred, target) -> float:
    """Mean of squared componentwise differences."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.size == 0 or target.size == 0:
        raise DataError("mse_loss needs nonempty inputs")
    if pred.shape != target.shape:
        raise DimensionError("mse_loss target", pred.size, target.size)
    diff = pred - target
    return float(np.mean(diff * diff))


def mse_loss_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    return 2.0 * (pred - target) / pred.size


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    if fan_in < 1 or fan_out < 1:
        raise DataError(f"zero-width layer ({fan_in} -> {fan_out})")
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


@dataclass
class GradientSet:
    """Per-layer (dW, db) pairs, in the owning network's layer order."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __len__(self):
        return len(self.weights)

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for pair in zip(self.weights, self.biases) for a in pair])


@dataclass
class OptimizerState:
    """Optimizer hyperparameters plus per-parameter Adam moments.

    Moments are allocated lazily on the first update so one state can be
    created before the network it will drive.
    """

    algorithm: str = "adam"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: List[np.ndarray] = field(default_factory=list)
    second_moment: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if self.algorithm not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.algorithm!r}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")


def optimizer_update(layers: Sequence[DenseLayer], grads: GradientSet, state: OptimizerState) -> None:
    """Apply one optimizer step in place to ``layers``.

    Gradients are validated for finiteness before any parameter is touched,
    so a failed update leaves the network unchanged.
    """
    if len(layers) != len(grads):
        raise DimensionError("gradient set", len(layers), len(grads))
    params, gparams = [], []
    for i, layer in enumerate(layers):
        gw, gb = grads.weights[i], grads.biases[i]
        if gw.shape != layer.weights.shape or gb.shape != layer.bias.shape:
            raise DimensionError(f"gradient for layer {i}", layer.weights.size, gw.size)
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise NumericError(f"non-finite gradient in layer {i}")
        params += [layer.weights, layer.bias]
        gparams += [gw, gb]

    state.step += 1
    lr = state.learning_rate
    if state.algorithm == "sgd":
        for p, g in zip(params, gparams):
            p -= lr * g
        return

    if not state.first_moment:
        state.first_moment = [np.zeros_like(p) for p in params]
        state.second_moment = [np.zeros_like(p) for p in params]
    b1, b2, t = state.beta1, state.beta2, state.step
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t
    for p, g, m, v in zip(params, gparams, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr * (m / corr1) / (np.sqrt(v / corr2) + state.eps)
