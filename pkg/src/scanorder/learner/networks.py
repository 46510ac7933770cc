"""Weight generator and weight evaluator networks."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import asdict, dataclass

import numpy as np

from ..grid import GridSize
from .layers import (
    Conv2x2Stride2,
    EdgePool,
    GCNLayer,
    Layer,
    Linear,
    ReLU,
    ResidualBlock,
    normalized_adjacency,
)

__all__ = ["Encoder", "Evaluator", "Generator", "NetConfig", "Standardize", "batch_mean_weights"]


@dataclass(frozen=True)
class NetConfig:
    width: int = 32  # feature width d
    res_blocks: int = 8  # m1
    gnn_blocks: int = 6  # m2
    linear: bool = False  # drop every nonlinearity (gradient audits)
    standardize: bool = True  # evaluator sees batch-mean weights z-scored
    dtype: str = "float64"

    def to_dict(self) -> dict:
        return asdict(self)


def batch_mean_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2 or len(w) == 0:
        raise ValueError("need a non-empty (B, E) stack of weight vectors")
    return w.mean(axis=0)


def _images(images, dtype) -> np.ndarray:
    x = np.asarray(images, dtype=dtype)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3:
        raise ValueError(f"expected (B, H, W) images, got shape {x.shape}")
    GridSize(x.shape[1], x.shape[2])
    return x


class _Net:
    layers: list[tuple[str, Layer]]

    def named_params(self) -> Iterator[tuple[str, np.ndarray, np.ndarray]]:
        for prefix, layer in self.layers:
            yield from layer.named_params(prefix + ".")

    @property
    def params(self) -> dict[str, np.ndarray]:
        return {name: p for name, p, _ in self.named_params()}

    @property
    def grads(self) -> dict[str, np.ndarray]:
        return {name: g for name, _, g in self.named_params()}

    def zero_grad(self) -> None:
        for _, layer in self.layers:
            layer.zero_grad()

    def load_params(self, params: dict[str, np.ndarray]) -> None:
        own = self.params
        if set(own) != set(params):
            missing = sorted(set(own) ^ set(params))
            raise ValueError(f"parameter names do not match: {missing[:5]}")
        for name, value in params.items():
            if own[name].shape != np.shape(value):
                raise ValueError(f"{name}: shape {np.shape(value)} != {own[name].shape}")
            own[name][...] = value

    def n_params(self) -> int:
        return sum(p.size for p in self.params.values())


def _cast(net: _Net, dtype: str) -> None:
    for _, layer in net.layers:
        for sub in _walk(layer):
            for name in sub.params:
                sub.params[name] = sub.params[name].astype(dtype)
                sub.grads[name] = np.zeros_like(sub.params[name])


def _walk(layer):
    yield layer
    for value in vars(layer).values():
        if isinstance(value, Layer):
            yield from _walk(value)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, Layer):
                    yield from _walk(item)


class Encoder(Layer):
    """Image -> per-dual-edge features: 2x2 stride-2 conv, residual blocks, edge pooling."""

    def __init__(self, cfg: NetConfig, rng: np.random.Generator):
        super().__init__()
        self.stem = Conv2x2Stride2(1, cfg.width, rng)
        self.stem_act = ReLU(cfg.linear)
        self.blocks = [ResidualBlock(cfg.width, rng, cfg.linear) for _ in range(cfg.res_blocks)]
        self.pool = EdgePool()

    def named_params(self, prefix: str = ""):
        yield from self.stem.named_params(prefix + "stem.")
        for i, blk in enumerate(self.blocks):
            yield from blk.named_params(f"{prefix}res{i}.")

    def zero_grad(self):
        self.stem.zero_grad()
        for blk in self.blocks:
            blk.zero_grad()

    def forward(self, images):
        x = self.stem_act.forward(self.stem.forward(images[..., None]))
        for blk in self.blocks:
            x = blk.forward(x)
        return self.pool.forward(x)

    def backward(self, g):
        g = self.pool.backward(g)
        for blk in reversed(self.blocks):
            g = blk.backward(g)
        self.stem.backward(self.stem_act.backward(g))


class _GNNStack(Layer):
    def __init__(self, sizes: list[tuple[int, int, bool]], rng: np.random.Generator, linear: bool):
        super().__init__()
        self.gcn = [
            GCNLayer(cin, cout, rng, relu=relu and not linear, gain=2.0 if relu else 1.0) for cin, cout, relu in sizes
        ]

    def named_params(self, prefix: str = ""):
        for i, layer in enumerate(self.gcn):
            yield from layer.named_params(f"{prefix}{i}.")

    def zero_grad(self):
        for layer in self.gcn:
            layer.zero_grad()

    def forward(self, h, adj):
        for layer in self.gcn:
            layer.adj = adj
            h = layer.forward(h)
        return h

    def backward(self, g):
        for layer in reversed(self.gcn):
            g = layer.backward(g)
        return g


class Generator(_Net):
    """Image -> one real weight per dual edge.

    The last graph convolution maps to a scalar with identity activation so
    weights are signed and unbounded.
    """

    def __init__(self, cfg: NetConfig = NetConfig(), seed: int | np.random.Generator = 0):
        rng = np.random.default_rng(seed)
        self.cfg = cfg
        d, m2 = cfg.width, cfg.gnn_blocks
        self.encoder = Encoder(cfg, rng)
        sizes = [(d, d, True)] * (m2 - 1) + [(d, 1, False)]
        self.line = _GNNStack(sizes, rng, cfg.linear)
        self.layers = [("enc", self.encoder), ("line", self.line)]
        _cast(self, cfg.dtype)

    def forward(self, images) -> np.ndarray:
        x = _images(images, self.cfg.dtype)
        adj = normalized_adjacency(x.shape[1], x.shape[2]).astype(self.cfg.dtype)
        feats = self.encoder.forward(x)
        return self.line.forward(feats, adj)[..., 0].astype(np.float64)

    __call__ = forward

    def backward(self, g_weights: np.ndarray) -> None:
        g = self.line.backward(np.asarray(g_weights)[..., None])
        self.encoder.backward(g)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


class Standardize(Layer):
    """z-score a weight vector; the induced scan order is invariant to this map."""

    def __init__(self, enabled: bool = True, eps: float = 1e-8):
        super().__init__()
        self.enabled = enabled
        self.eps = eps

    def forward(self, w):
        if not self.enabled:
            return w
        mu = w.mean()
        self._scale = np.sqrt(((w - mu) ** 2).mean() + self.eps)
        self._z = (w - mu) / self._scale
        return self._z

    def backward(self, g):
        if not self.enabled:
            return g
        z = self._z
        return (g - g.mean() - z * (g * z).mean()) / self._scale


class Evaluator(_Net):
    """(batch-mean weights, image) -> estimate of the normalised objective in (0, 1)."""

    def __init__(self, cfg: NetConfig = NetConfig(), seed: int | np.random.Generator = 1):
        rng = np.random.default_rng(seed)
        self.cfg = cfg
        d, m2 = cfg.width, cfg.gnn_blocks
        self.encoder = Encoder(cfg, rng)
        self.norm = Standardize(cfg.standardize and not cfg.linear)
        self.fuse = Linear(d + 1, d, rng)
        self.fuse_act = ReLU(cfg.linear)
        self.line = _GNNStack([(d, d, True)] * m2, rng, cfg.linear)
        self.head1 = Linear(d, d, rng)
        self.head_act = ReLU(cfg.linear)
        self.head2 = Linear(d, 1, rng, gain=1.0, bias=0.0)
        self.layers = [
            ("enc", self.encoder),
            ("fuse", self.fuse),
            ("line", self.line),
            ("head1", self.head1),
            ("head2", self.head2),
        ]
        _cast(self, cfg.dtype)

    def encode(self, images) -> np.ndarray:
        """Image branch alone; pass the result as ``features`` to reuse it."""
        return self.encoder.forward(_images(images, self.cfg.dtype))

    def forward(self, wbar, images=None, features=None) -> np.ndarray:
        feats = self.encode(images) if features is None else features
        b, n_edges, _ = feats.shape
        wbar = np.asarray(wbar, dtype=self.cfg.dtype)
        if wbar.shape != (n_edges,):
            raise ValueError(f"expected {n_edges} batch-mean weights, got shape {wbar.shape}")
        h2, w2 = self.encoder.pool._shape[1:3]
        adj = normalized_adjacency(2 * h2, 2 * w2).astype(self.cfg.dtype)
        z = self.norm.forward(wbar)
        joined = np.concatenate([feats, np.broadcast_to(z[None, :, None], (b, n_edges, 1))], axis=2)
        hid = self.line.forward(self.fuse_act.forward(self.fuse.forward(joined)), adj)
        self._nodes = hid.shape[1]
        pooled = hid.mean(axis=1)
        logit = self.head2.forward(self.head_act.forward(self.head1.forward(pooled)))[:, 0]
        if self.cfg.linear:
            self._out = logit
        else:
            self._out = _sigmoid(logit)
        return self._out.astype(np.float64)

    __call__ = forward

    def backward(self, g_out: np.ndarray, encoder: bool = True) -> np.ndarray:
        """Backpropagate ``d loss / d estimate``; returns ``d loss / d wbar``.

        ``encoder=False`` skips the image branch when only the weight
        gradient is wanted.
        """
        g = np.asarray(g_out, dtype=self.cfg.dtype)
        if not self.cfg.linear:
            g = g * self._out * (1.0 - self._out)
        g = self.head1.backward(self.head_act.backward(self.head2.backward(g[:, None])))
        g = np.repeat(g[:, None, :] / self._nodes, self._nodes, axis=1)
        g = self.fuse.backward(self.fuse_act.backward(self.line.backward(g)))
        if encoder:
            self.encoder.backward(g[..., :-1])
        return self.norm.backward(g[..., -1].sum(axis=0)).astype(np.float64)
