"""Numpy layers with hand-written reverse-mode gradients.

Activations are channels-last. Every layer caches what its backward pass
needs during ``forward``; ``backward`` takes the gradient of a scalar loss
with respect to the layer output, accumulates parameter gradients into
``grads`` and returns the gradient with respect to the input.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..grid import build_dual, build_line_graph

__all__ = [
    "Conv2x2Stride2",
    "Conv3x3",
    "EdgePool",
    "GCNLayer",
    "Layer",
    "Linear",
    "ReLU",
    "ResidualBlock",
    "normalized_adjacency",
]


class Layer:
    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def add_param(self, name: str, value: np.ndarray) -> None:
        self.params[name] = value
        self.grads[name] = np.zeros_like(value)

    def named_params(self, prefix: str = ""):
        for name, value in self.params.items():
            yield prefix + name, value, self.grads[name]

    def zero_grad(self) -> None:
        for g in self.grads.values():
            g[...] = 0.0


# ReLU layers start with a small positive bias so zero inputs (padding, dead
# patches) do not sit exactly on the activation kink
RELU_BIAS = 0.01


def _he(rng: np.random.Generator, fan_in: int, shape, gain: float = 2.0) -> np.ndarray:
    return rng.normal(0.0, np.sqrt(gain / fan_in), size=shape)


class Conv2x2Stride2(Layer):
    """Non-overlapping 2x2 convolution: one output vector per circuit."""

    def __init__(self, cin: int, cout: int, rng: np.random.Generator):
        super().__init__()
        self.add_param("w", _he(rng, 4 * cin, (4 * cin, cout)))
        self.add_param("b", np.full(cout, RELU_BIAS))

    def forward(self, x):
        b, h, w, c = x.shape
        cols = x.reshape(b, h // 2, 2, w // 2, 2, c).transpose(0, 1, 3, 2, 4, 5)
        self._cols = cols.reshape(-1, 4 * c)
        self._shape = x.shape
        out = self._cols @ self.params["w"] + self.params["b"]
        return out.reshape(b, h // 2, w // 2, -1)

    def backward(self, g):
        b, h, w, c = self._shape
        g2 = g.reshape(-1, g.shape[-1])
        self.grads["w"] += self._cols.T @ g2
        self.grads["b"] += g2.sum(0)
        dcols = (g2 @ self.params["w"].T).reshape(b, h // 2, w // 2, 2, 2, c)
        return dcols.transpose(0, 1, 3, 2, 4, 5).reshape(self._shape)


class Conv3x3(Layer):
    """3x3 convolution, stride 1, zero padding 1 (shape preserving)."""

    def __init__(self, cin: int, cout: int, rng: np.random.Generator, gain: float = 2.0):
        super().__init__()
        self.add_param("w", _he(rng, 9 * cin, (9 * cin, cout), gain))
        self.add_param("b", np.full(cout, RELU_BIAS))

    def forward(self, x):
        b, h, w, c = x.shape
        xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
        cols = np.empty((b, h, w, 9, c), dtype=x.dtype)
        for k in range(9):
            dy, dx = divmod(k, 3)
            cols[:, :, :, k] = xp[:, dy : dy + h, dx : dx + w]
        self._cols = cols.reshape(-1, 9 * c)
        self._shape = x.shape
        return (self._cols @ self.params["w"] + self.params["b"]).reshape(b, h, w, -1)

    def backward(self, g):
        b, h, w, c = self._shape
        g2 = g.reshape(-1, g.shape[-1])
        self.grads["w"] += self._cols.T @ g2
        self.grads["b"] += g2.sum(0)
        dcols = (g2 @ self.params["w"].T).reshape(b, h, w, 9, c)
        dxp = np.zeros((b, h + 2, w + 2, c), dtype=g.dtype)
        for k in range(9):
            dy, dx = divmod(k, 3)
            dxp[:, dy : dy + h, dx : dx + w] += dcols[:, :, :, k]
        return dxp[:, 1:-1, 1:-1]


class ReLU(Layer):
    def __init__(self, linear: bool = False):
        super().__init__()
        self.linear = linear

    def forward(self, x):
        if self.linear:
            return x
        self._mask = x > 0
        return x * self._mask

    def backward(self, g):
        return g if self.linear else g * self._mask


class ResidualBlock(Layer):
    """``relu(x + conv(relu(conv(x))))``."""

    def __init__(self, width: int, rng: np.random.Generator, linear: bool = False):
        super().__init__()
        self.conv1 = Conv3x3(width, width, rng)
        # small second conv keeps the residual stream well-scaled at init
        self.conv2 = Conv3x3(width, width, rng, gain=0.5)
        self.act1 = ReLU(linear)
        self.act2 = ReLU(linear)

    def named_params(self, prefix: str = ""):
        yield from self.conv1.named_params(prefix + "conv1.")
        yield from self.conv2.named_params(prefix + "conv2.")

    def zero_grad(self):
        self.conv1.zero_grad()
        self.conv2.zero_grad()

    def forward(self, x):
        y = self.conv2.forward(self.act1.forward(self.conv1.forward(x)))
        return self.act2.forward(x + y)

    def backward(self, g):
        g = self.act2.backward(g)
        return g + self.conv1.backward(self.act1.backward(self.conv2.backward(g)))


class EdgePool(Layer):
    """Average the two circuit features at the ends of each dual edge.

    Horizontal edges use a 1x2 window, vertical edges a 2x1 window; the
    results are concatenated in dual-edge order, giving ``(B, E, C)``.
    """

    def forward(self, x):
        b, h, w, c = x.shape
        self._shape = x.shape
        horiz = 0.5 * (x[:, :, :-1] + x[:, :, 1:])
        vert = 0.5 * (x[:, :-1, :] + x[:, 1:, :])
        return np.concatenate([horiz.reshape(b, -1, c), vert.reshape(b, -1, c)], axis=1)

    def backward(self, g):
        b, h, w, c = self._shape
        nh = h * (w - 1)
        gh = 0.5 * g[:, :nh].reshape(b, h, w - 1, c)
        gv = 0.5 * g[:, nh:].reshape(b, h - 1, w, c)
        dx = np.zeros(self._shape, dtype=g.dtype)
        dx[:, :, :-1] += gh
        dx[:, :, 1:] += gh
        dx[:, :-1, :] += gv
        dx[:, 1:, :] += gv
        return dx


@lru_cache(maxsize=32)
def normalized_adjacency(height: int, width: int) -> sp.csr_matrix:
    """``D^-1/2 (A + I) D^-1/2`` of the line graph of the dual graph of an HxW grid."""
    lg = build_line_graph(build_dual((height, width)))
    n = lg.n_nodes
    rows = np.concatenate([lg.edges[:, 0], lg.edges[:, 1], np.arange(n)])
    cols = np.concatenate([lg.edges[:, 1], lg.edges[:, 0], np.arange(n)])
    a = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    deg = np.asarray(a.sum(axis=1)).ravel()
    dinv = sp.diags(1.0 / np.sqrt(deg))
    return (dinv @ a @ dinv).tocsr()


def _propagate(adj: sp.csr_matrix, h: np.ndarray) -> np.ndarray:
    b, n, c = h.shape
    flat = h.transpose(1, 0, 2).reshape(n, b * c)
    return (adj @ flat).reshape(n, b, c).transpose(1, 0, 2)


class GCNLayer(Layer):
    """Graph convolution ``act(A_hat @ h @ theta + bias)`` on a fixed graph."""

    def __init__(self, cin: int, cout: int, rng: np.random.Generator, relu: bool = True, gain: float = 2.0):
        super().__init__()
        self.add_param("theta", _he(rng, cin, (cin, cout), gain))
        self.add_param("b", np.full(cout, RELU_BIAS if relu else 0.0))
        self.act = ReLU(linear=not relu)
        self.adj: sp.csr_matrix | None = None

    def forward(self, h):
        self._ah = _propagate(self.adj, h)
        return self.act.forward(self._ah @ self.params["theta"] + self.params["b"])

    def backward(self, g):
        g = self.act.backward(g)
        cout = g.shape[-1]
        self.grads["theta"] += self._ah.reshape(-1, self._ah.shape[-1]).T @ g.reshape(-1, cout)
        self.grads["b"] += g.reshape(-1, cout).sum(0)
        # A_hat is symmetric
        return _propagate(self.adj, g @ self.params["theta"].T)


class Linear(Layer):
    def __init__(self, cin: int, cout: int, rng: np.random.Generator, gain: float = 2.0, bias: float = RELU_BIAS):
        super().__init__()
        self.add_param("w", _he(rng, cin, (cin, cout), gain))
        self.add_param("b", np.full(cout, bias))

    def forward(self, x):
        self._x = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, g):
        cin, cout = self.params["w"].shape
        self.grads["w"] += self._x.reshape(-1, cin).T @ g.reshape(-1, cout)
        self.grads["b"] += g.reshape(-1, cout).sum(0)
        return g @ self.params["w"].T
