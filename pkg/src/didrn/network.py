"""Plain, residual (DRN) and improved-residual (DIDRN) networks.

All three share one layout: a linear input projection onto ``hidden_width``,
``num_blocks`` square hidden layers, and a linear output projection. They
differ only in how block outputs are combined:

* plain:  a_i = L_i(a_{i-1})
* drn:    a_i = L_i(a_{i-1}) + a_{i-1}
* didrn:  z_i = L_i(in_i), in_{i+1} = z_i + in_i, output head sees z_B + z_{B-1}

For two blocks f, h with identity projections the didrn graph computes
``h(f(x) + x) + f(x)``.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import DataError, DimensionError, NumericError
from .nn import (
    ACTIVATIONS,
    DenseLayer,
    GradientSet,
    OptimizerState,
    glorot_uniform,
    layer_backward,
    layer_forward,
    mse_loss,
    mse_loss_grad,
    optimizer_update,
)

logger = logging.getLogger(__name__)

TOPOLOGIES = ("plain", "drn", "didrn")


@dataclass(frozen=True)
class NetworkConfig:
    topology: str = "didrn"
    input_dim: int = 1
    hidden_width: int = 32
    num_blocks: int = 16
    output_dim: int = 1
    hidden_activation: str = "tanh"

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}; choose from {TOPOLOGIES}")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.hidden_activation!r}")
        for name in ("input_dim", "hidden_width", "num_blocks", "output_dim"):
            if getattr(self, name) < 1:
                raise DataError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass
class Network:
    config: NetworkConfig
    input_projection: DenseLayer
    blocks: List[DenseLayer]
    output_projection: DenseLayer

    def __post_init__(self):
        if len(self.blocks) != self.config.num_blocks:
            raise DimensionError("block list", self.config.num_blocks, len(self.blocks))
        w = self.input_projection.out_dim
        for i, blk in enumerate(self.blocks):
            if blk.weights.shape != (w, w):
                raise DimensionError(f"block {i} width", w, blk.out_dim)
        if self.output_projection.in_dim != w:
            raise DimensionError("output projection input", w, self.output_projection.in_dim)

    @property
    def layers(self) -> List[DenseLayer]:
        """All layers in canonical order: input projection, blocks, output projection."""
        return [self.input_projection, *self.blocks, self.output_projection]

    def copy(self) -> "Network":
        return Network(
            self.config,
            self.input_projection.copy(),
            [b.copy() for b in self.blocks],
            self.output_projection.copy(),
        )

    def parameters_equal(self, other: "Network") -> bool:
        return self.config == other.config and all(
            np.array_equal(a.weights, b.weights) and np.array_equal(a.bias, b.bias)
            for a, b in zip(self.layers, other.layers)
        )

    def __call__(self, x) -> np.ndarray:
        return forward(self, x)


def init_network(config: NetworkConfig, seed: int) -> Network:
    """Glorot-uniform weights, zero biases; a pure function of (config, seed)."""
    rng = np.random.default_rng(seed)
    w = config.hidden_width

    def make(fan_in, fan_out, act):
        return DenseLayer(glorot_uniform(rng, fan_in, fan_out), np.zeros(fan_out), act)

    inp = make(config.input_dim, w, "linear")
    blocks = [make(w, w, config.hidden_activation) for _ in range(config.num_blocks)]
    out = make(w, config.output_dim, "linear")
    return Network(config, inp, blocks, out)


def _as_batch(net: Network, x) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim <= 1
    if single:
        x = x.reshape(1, -1)
    if x.shape[1] != net.config.input_dim:
        raise DimensionError("network input", net.config.input_dim, x.shape[1])
    return x, single


def _forward_cached(net: Network, x: np.ndarray):
    """Forward pass on a batch, returning the output and the per-layer caches.

    The cache holds (layer_input, layer_output) for every layer in
    ``net.layers`` order.
    """
    topo = net.config.topology
    cache = []
    h = layer_forward(net.input_projection, x)
    cache.append((x, h))
    zs = []
    for blk in net.blocks:
        z = layer_forward(blk, h)
        cache.append((h, z))
        zs.append(z)
        if topo == "plain":
            h = z
        else:
            h = z + h
    if topo == "didrn":
        u = zs[-1] + zs[-2] if len(zs) >= 2 else zs[-1]
    else:
        u = h
    out = layer_forward(net.output_projection, u)
    cache.append((u, out))
    return out, cache


def forward(net: Network, x) -> np.ndarray:
    """Evaluate the network on one input vector or a (batch, input_dim) array."""
    batch, single = _as_batch(net, x)
    out, _ = _forward_cached(net, batch)
    return out[0] if single else out


def _forward_as(net: Network, topology: str, x) -> np.ndarray:
    if net.config.topology != topology:
        raise ValueError(f"network topology is {net.config.topology!r}, not {topology!r}")
    return forward(net, x)


def forward_plain(net: Network, x) -> np.ndarray:
    return _forward_as(net, "plain", x)


def forward_drn(net: Network, x) -> np.ndarray:
    return _forward_as(net, "drn", x)


def forward_didrn(net: Network, x) -> np.ndarray:
    return _forward_as(net, "didrn", x)


def _backward(net: Network, cache, grad_out: np.ndarray) -> GradientSet:
    n_layers = len(cache)
    gws: List[Optional[np.ndarray]] = [None] * n_layers
    gbs: List[Optional[np.ndarray]] = [None] * n_layers

    u, out = cache[-1]
    gws[-1], gbs[-1], grad_u = layer_backward(net.output_projection, u, out, grad_out)

    topo = net.config.topology
    n_blocks = len(net.blocks)
    # grad_h: gradient w.r.t. the input of the block currently being processed
    # (and, for skip topologies, the running sum it is part of).
    if topo == "didrn":
        grad_z_head = [None] * n_blocks
        grad_z_head[-1] = grad_u
        if n_blocks >= 2:
            grad_z_head[-2] = grad_u
        grad_next_in = np.zeros_like(grad_u)
        for i in range(n_blocks - 1, -1, -1):
            # in_{i+1} = z_i + in_i feeds block i+1 (unused after the last block)
            grad_z = grad_next_in
            if grad_z_head[i] is not None:
                grad_z = grad_z + grad_z_head[i]
            inp, z = cache[i + 1]
            gws[i + 1], gbs[i + 1], grad_in_layer = layer_backward(net.blocks[i], inp, z, grad_z)
            grad_next_in = grad_in_layer + grad_next_in
        grad_h = grad_next_in
    else:
        grad_h = grad_u
        for i in range(n_blocks - 1, -1, -1):
            inp, z = cache[i + 1]
            gws[i + 1], gbs[i + 1], grad_in_layer = layer_backward(net.blocks[i], inp, z, grad_h)
            grad_h = grad_in_layer + grad_h if topo == "drn" else grad_in_layer

    x, h0 = cache[0]
    gws[0], gbs[0], _ = layer_backward(net.input_projection, x, h0, grad_h)
    return GradientSet(gws, gbs)


def _targets(net: Network, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim <= 1:
        y = y.reshape(-1, net.config.output_dim)
    if y.shape[1] != net.config.output_dim:
        raise DimensionError("network target", net.config.output_dim, y.shape[1])
    return y


def loss_and_gradients(net: Network, x, y) -> Tuple[float, GradientSet]:
    """Mean-squared-error loss of the batch and its gradient for every parameter."""
    batch, _ = _as_batch(net, x)
    target = _targets(net, y)
    if batch.shape[0] == 0:
        raise DataError("empty batch")
    if target.shape[0] != batch.shape[0]:
        raise DimensionError("target rows", batch.shape[0], target.shape[0])
    out, cache = _forward_cached(net, batch)
    return mse_loss(out, target), _backward(net, cache, mse_loss_grad(out, target))


def compute_gradients(net: Network, x, y) -> GradientSet:
    return loss_and_gradients(net, x, y)[1]


def batch_loss(net: Network, x, y) -> float:
    batch, _ = _as_batch(net, x)
    return mse_loss(_forward_cached(net, batch)[0], _targets(net, y))


def train(
    net: Network,
    x,
    y,
    epochs: int,
    batch_size: int = 64,
    optimizer: Optional[OptimizerState] = None,
    seed: int = 0,
    lr_decay: float = 1.0,
) -> Tuple[Network, List[float]]:
    """Minibatch training with per-epoch shuffling driven by ``seed``.

    The optimizer learning rate is multiplied by ``lr_decay`` after every epoch.

    The input network is left untouched; a trained copy is returned with the
    sample-weighted mean batch loss of every epoch.
    """
    if epochs < 0 or batch_size < 1:
        raise ValueError("epochs must be >= 0 and batch_size >= 1")
    x, _ = _as_batch(net, x)
    y = _targets(net, y)
    if x.shape[0] == 0:
        raise DataError("cannot train on an empty data set")
    if x.shape[0] != y.shape[0]:
        raise DimensionError("target rows", x.shape[0], y.shape[0])
    net = net.copy()
    if optimizer is None:
        optimizer = OptimizerState()
    rng = np.random.default_rng(seed)
    layers = net.layers
    n = x.shape[0]
    history = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        total = 0.0
        for b, start in enumerate(range(0, n, batch_size)):
            idx = order[start : start + batch_size]
            loss, grads = loss_and_gradients(net, x[idx], y[idx])
            if not np.isfinite(loss):
                raise NumericError(f"non-finite loss at epoch {epoch}, batch {b}")
            optimizer_update(layers, grads, optimizer)
            total += loss * len(idx)
        history.append(total / n)
        optimizer.learning_rate *= lr_decay
        logger.debug("epoch %d loss %.6g", epoch, history[-1])
    return net, history


# --- serialization ---------------------------------------------------------

MAGIC = b"DIDRNNET"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sI5I")  # magic, version, topology, in, width, blocks, out
_ACT_CODES = {"tanh": 0, "linear": 1}


def network_to_bytes(net: Network) -> bytes:
    c = net.config
    parts = [
        _HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            TOPOLOGIES.index(c.topology),
            c.input_dim,
            c.hidden_width,
            c.num_blocks,
            c.output_dim,
        ),
        struct.pack("<I", _ACT_CODES[c.hidden_activation]),
    ]
    for layer in net.layers:
        parts.append(layer.weights.astype("<f8").tobytes(order="C"))
        parts.append(layer.bias.astype("<f8").tobytes())
    return b"".join(parts)


def network_from_bytes(blob: bytes) -> Network:
    if len(blob) < _HEADER.size + 4:
        raise DataError("model file truncated")
    magic, version, topo, in_dim, width, n_blocks, out_dim = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise DataError("not a model file (bad magic tag)")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version}")
    (act_code,) = struct.unpack_from("<I", blob, _HEADER.size)
    act = {v: k for k, v in _ACT_CODES.items()}[act_code]
    config = NetworkConfig(TOPOLOGIES[topo], in_dim, width, n_blocks, out_dim, act)
    shapes = [(width, in_dim)] + [(width, width)] * n_blocks + [(out_dim, width)]
    acts = ["linear"] + [act] * n_blocks + ["linear"]
    expected = _HEADER.size + 4 + 8 * sum(r * c + r for r, c in shapes)
    if len(blob) != expected:
        raise DataError(f"model file has {len(blob)} bytes, expected {expected}")
    offset = _HEADER.size + 4
    layers = []
    for (rows, cols), a in zip(shapes, acts):
        w = np.frombuffer(blob, "<f8", rows * cols, offset).reshape(rows, cols)
        offset += 8 * rows * cols
        b = np.frombuffer(blob, "<f8", rows, offset)
        offset += 8 * rows
        layers.append(DenseLayer(w.astype(np.float64), b.astype(np.float64), a))
    return Network(config, layers[0], layers[1:-1], layers[-1])


def save_network(net: Network, path) -> None:
    Path(path).write_bytes(network_to_bytes(net))


def load_network(path) -> Network:
    return network_from_bytes(Path(path).read_bytes())


def config_dict(config: NetworkConfig) -> dict:
    return asdict(config)
