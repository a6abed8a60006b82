"""Shared fixtures-by-function for the test suite."""

import numpy as np

from didrn.network import Network, NetworkConfig, init_network
from didrn.nn import DenseLayer


def scalar_net(topology, block_weights, proj=1.0, activation="linear"):
    """1-wide network with scalar blocks ``w*x`` and scalar projections."""
    cfg = NetworkConfig(topology, 1, 1, len(block_weights), 1, activation)
    blocks = [DenseLayer([[w]], [0.0], activation) for w in block_weights]
    return Network(cfg, DenseLayer([[proj]], [0.0], "linear"), blocks, DenseLayer([[proj]], [0.0], "linear"))


def identity_projected_net(topology, width, num_blocks, seed):
    """Random tanh blocks between identity input/output projections."""
    cfg = NetworkConfig(topology, width, width, num_blocks, width, "tanh")
    net = init_network(cfg, seed)
    rng = np.random.default_rng(seed + 1000)
    for blk in net.blocks:
        blk.bias[:] = rng.uniform(-0.5, 0.5, width)
    eye = np.eye(width)
    net.input_projection = DenseLayer(eye, np.zeros(width), "linear")
    net.output_projection = DenseLayer(eye, np.zeros(width), "linear")
    return net


def finite_difference_gradients(net, loss_fn, eps=1e-5):
    """Central differences of ``loss_fn(net)``, perturbing one parameter at a time."""
    grads = []
    for layer in net.layers:
        pair = []
        for arr in (layer.weights, layer.bias):
            g = np.zeros_like(arr)
            flat, gflat = arr.reshape(-1), g.reshape(-1)
            for k in range(flat.size):
                orig = flat[k]
                flat[k] = orig + eps
                up = loss_fn(net)
                flat[k] = orig - eps
                down = loss_fn(net)
                flat[k] = orig
                gflat[k] = (up - down) / (2 * eps)
            pair.append(g)
        grads.append(pair)
    return grads


def relative_errors(analytic, numeric, floor=1e-8):
    a, n = np.abs(analytic), np.abs(numeric)
    return np.abs(analytic - numeric) / np.maximum(np.maximum(a, n), floor)


def random_net(topology, seed, max_blocks=4, max_width=8, max_lag=3):
    rng = np.random.default_rng(seed)
    cfg = NetworkConfig(
        topology,
        input_dim=int(rng.integers(1, max_lag + 1)),
        hidden_width=int(rng.integers(1, max_width + 1)),
        num_blocks=int(rng.integers(1, max_blocks + 1)),
        output_dim=1,
    )
    net = init_network(cfg, seed)
    for layer in net.layers:
        layer.bias[:] = rng.normal(0, 0.3, layer.bias.shape)
    n = int(rng.integers(1, 17))
    x = rng.uniform(-1, 1, (n, cfg.input_dim))
    y = rng.uniform(-1, 1, n)
    return net, x, y
