"""Alternating training of the weight generator and the weight evaluator."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..cover_merge import dafner_weights, sfc_from_weights
from ..grid import GridSize
from ..objectives import Objective, normalized_objective, objective
from .networks import Evaluator, Generator, NetConfig, batch_mean_weights

__all__ = [
    "SGD",
    "Adam",
    "History",
    "TrainConfig",
    "TrainResult",
    "TrainingDivergedError",
    "evaluator_loss",
    "ground_truth",
    "set_weights",
    "train",
]

log = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 4
    lr_generator: float = 1e-3
    lr_evaluator: float = 1e-3
    momentum: float = 0.9
    p_dafner: float = 0.25
    p_noise: float = 0.25
    objective: Objective = Objective()
    iterations: int = 2000
    seed: int = 0
    eval_every: int = 100
    clip_norm: float | None = 1.0
    optimizer: str = "adam"  # or "sgd" (heavy-ball momentum)
    lr_schedule: str = "cosine"  # both rates decay to zero at the last iteration; or "constant"
    net: NetConfig = NetConfig(dtype="float32")

    def __post_init__(self):
        if self.p_dafner < 0 or self.p_noise < 0 or self.p_dafner + self.p_noise > 1:
            raise ValueError("mixture probabilities must be >= 0 and sum to at most 1")
        if self.batch_size < 1 or self.iterations < 0:
            raise ValueError("batch_size must be positive and iterations non-negative")
        if self.lr_schedule not in ("constant", "cosine"):
            raise ValueError("lr_schedule must be 'constant' or 'cosine'")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {sorted(OPTIMIZERS)}")


class SGD:
    """Stochastic gradient descent with heavy-ball momentum and optional global-norm clipping."""

    def __init__(self, net, lr: float, momentum: float = 0.9, clip_norm: float | None = None):
        self.net = net
        self.lr = lr
        self.momentum = momentum
        self.clip_norm = clip_norm
        self.velocity = {name: np.zeros_like(p) for name, p, _ in net.named_params()}

    def step(self) -> float:
        grads = [(name, p, g) for name, p, g in self.net.named_params()]
        norm = float(np.sqrt(sum(float((g.astype(np.float64) ** 2).sum()) for _, _, g in grads)))
        scale = 1.0
        if self.clip_norm is not None and norm > self.clip_norm:
            scale = self.clip_norm / norm
        if self.lr == 0.0:
            return norm
        for name, p, g in grads:
            v = self.velocity[name]
            v *= self.momentum
            v += scale * g
            p -= self.lr * v
        return norm


class Adam(SGD):
    """Adam with bias correction; the same global-norm clipping is applied first."""

    def __init__(
        self,
        net,
        lr: float,
        momentum: float = 0.9,
        clip_norm: float | None = None,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        super().__init__(net, lr, momentum, clip_norm)
        self.beta2 = beta2
        self.eps = eps
        self.second = {name: np.zeros_like(p) for name, p, _ in net.named_params()}
        self.t = 0

    def step(self) -> float:
        grads = [(name, p, g) for name, p, g in self.net.named_params()]
        norm = float(np.sqrt(sum(float((g.astype(np.float64) ** 2).sum()) for _, _, g in grads)))
        scale = 1.0
        if self.clip_norm is not None and norm > self.clip_norm:
            scale = self.clip_norm / norm
        if self.lr == 0.0:
            return norm
        self.t += 1
        b1, b2 = self.momentum, self.beta2
        lr_t = self.lr * np.sqrt(1 - b2**self.t) / (1 - b1**self.t)
        for name, p, g in grads:
            g = scale * g
            m, v = self.velocity[name], self.second[name]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p -= (lr_t * m / (np.sqrt(v) + self.eps)).astype(p.dtype)
        return norm


OPTIMIZERS = {"sgd": SGD, "adam": Adam}


@dataclass
class History:
    iteration: list[int] = field(default_factory=list)
    evaluator_loss: list[float] = field(default_factory=list)
    generator_loss: list[float] = field(default_factory=list)
    eval_iteration: list[int] = field(default_factory=list)
    heldout_objective: list[float] = field(default_factory=list)
    heldout_normalized: list[float] = field(default_factory=list)

    def rows(self):
        """One dict per iteration, held-out columns blank except at evaluation points."""
        evals = dict(zip(self.eval_iteration, zip(self.heldout_objective, self.heldout_normalized)))
        for it, le, lg in zip(self.iteration, self.evaluator_loss, self.generator_loss):
            obj, norm = evals.get(it, (None, None))
            yield {
                "iteration": it,
                "evaluator_loss": le,
                "generator_loss": lg,
                "heldout_objective": obj,
                "heldout_normalized": norm,
            }

    def window_mean(self, end: int, width: int = 50) -> float:
        """Mean evaluator loss over the ``width`` iterations ending at ``end`` (inclusive)."""
        it = np.asarray(self.iteration)
        sel = (it > end - width) & (it <= end)
        return float(np.mean(np.asarray(self.evaluator_loss)[sel]))


@dataclass
class TrainResult:
    generator: Generator
    evaluator: Evaluator
    history: History
    seconds: float = 0.0


def ground_truth(images, wbar, kind: Objective) -> np.ndarray:
    """Normalised objective of every image read along the order induced by ``wbar``."""
    images = np.asarray(images, dtype=np.float64)
    order = sfc_from_weights(GridSize(*images.shape[1:]), wbar)
    return np.atleast_1d(normalized_objective(images, order, kind))


def evaluator_loss(estimates, targets) -> float:
    """Mean squared error between estimated and true normalised objectives."""
    d = np.asarray(estimates, dtype=np.float64) - np.asarray(targets, dtype=np.float64)
    return float(np.mean(d * d))


def set_weights(generator: Generator, images, chunk: int = 64) -> np.ndarray:
    """Batch-mean generator weights over a whole image set."""
    images = np.asarray(images)
    parts = [generator(images[i : i + chunk]) for i in range(0, len(images), chunk)]
    total = sum(p.sum(axis=0) for p in parts)
    return total / len(images)


def _heldout_score(generator: Generator, images, kind: Objective) -> tuple[float, float]:
    wbar = set_weights(generator, images)
    order = sfc_from_weights(GridSize(*images.shape[1:]), wbar)
    return float(np.mean(objective(images, order, kind))), float(np.mean(normalized_objective(images, order, kind)))


def _finite(value, what: str, it: int) -> None:
    if not np.all(np.isfinite(value)):
        raise TrainingDivergedError(f"non-finite {what} at iteration {it}; lower the learning rates")


def train(
    images,
    config: TrainConfig = TrainConfig(),
    heldout=None,
    generator: Generator | None = None,
    evaluator: Evaluator | None = None,
) -> TrainResult:
    """Alternate generator and evaluator updates.

    Per iteration: (1) generate per-image weights for a minibatch, average
    them, and step the generator down the frozen evaluator's estimate;
    (2) for each example keep the generator's weights, or swap in Dafner
    weights (probability ``p_dafner``) or standard-normal noise
    (``p_noise``), average, compute the true objective of the induced
    order, and step the evaluator on the squared error.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 3 or len(images) == 0:
        raise ValueError("training needs a non-empty (N, H, W) image stack")
    size = GridSize(*images.shape[1:])
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    gen = generator or Generator(cfg.net, seed=rng.integers(2**32))
    ev = evaluator or Evaluator(cfg.net, seed=rng.integers(2**32))
    opt = OPTIMIZERS[cfg.optimizer]
    opt_g = opt(gen, cfg.lr_generator, cfg.momentum, cfg.clip_norm)
    opt_e = opt(ev, cfg.lr_evaluator, cfg.momentum, cfg.clip_norm)
    hist = History()
    b = min(cfg.batch_size, len(images))
    dafner_cache: dict[int, np.ndarray] = {}
    t0 = time.perf_counter()

    def heldout_eval(it: int) -> None:
        if heldout is None or not cfg.eval_every:
            return
        obj, norm = _heldout_score(gen, np.asarray(heldout, dtype=np.float64), cfg.objective)
        hist.eval_iteration.append(it)
        hist.heldout_objective.append(obj)
        hist.heldout_normalized.append(norm)
        log.info("iter %d  held-out objective %.4f", it, obj)

    heldout_eval(0)
    for it in range(1, cfg.iterations + 1):
        if cfg.lr_schedule == "cosine":
            f = 0.5 * (1.0 + np.cos(np.pi * (it - 1) / cfg.iterations))
            opt_g.lr, opt_e.lr = f * cfg.lr_generator, f * cfg.lr_evaluator
        idx = rng.choice(len(images), size=b, replace=False)
        x = images[idx]

        # generator step, evaluator frozen
        w = gen(x)
        _finite(w, "generator weights", it)
        wbar = batch_mean_weights(w)
        feats = ev.encode(x)
        est = ev(wbar, features=feats)
        ev.zero_grad()
        g_wbar = ev.backward(np.full(b, 1.0 / b), encoder=False)
        gen.zero_grad()
        gen.backward(np.broadcast_to(g_wbar / b, w.shape))
        opt_g.step()

        # evaluator step on a mixture of weight sources
        u = rng.random(b)
        mixed = w.copy()
        for j in range(b):
            if u[j] < cfg.p_dafner:
                key = int(idx[j])
                if key not in dafner_cache:
                    dafner_cache[key] = dafner_weights(x[j])
                mixed[j] = dafner_cache[key]
            elif u[j] < cfg.p_dafner + cfg.p_noise:
                mixed[j] = rng.standard_normal(size.dual_edges)
        wbar_mix = batch_mean_weights(mixed)
        target = ground_truth(x, wbar_mix, cfg.objective)
        est_mix = ev(wbar_mix, features=feats)
        loss_e = evaluator_loss(est_mix, target)
        _finite(loss_e, "evaluator loss", it)
        ev.zero_grad()
        ev.backward(2.0 * (est_mix - target) / b)
        opt_e.step()

        hist.iteration.append(it)
        hist.evaluator_loss.append(loss_e)
        hist.generator_loss.append(float(np.mean(est)))
        if cfg.eval_every and it % cfg.eval_every == 0:
            heldout_eval(it)
    return TrainResult(gen, ev, hist, time.perf_counter() - t0)
