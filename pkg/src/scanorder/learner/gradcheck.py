"""Central-difference audit of the hand-written backward passes."""

from __future__ import annotations

import numpy as np

from .networks import Evaluator, Generator, NetConfig

__all__ = ["TINY", "finite_diff_check", "scalar_and_grads"]

TINY = NetConfig(width=4, res_blocks=1, gnn_blocks=2, dtype="float64")


def _scalar(gen: Generator, ev: Evaluator, images, wbar=None) -> float:
    if wbar is None:
        wbar = gen(images).mean(axis=0)
    return float(np.mean(ev(wbar, images)))


def scalar_and_grads(gen: Generator, ev: Evaluator, images, which: str, wbar=None):
    """Mean evaluator estimate and its analytic gradient w.r.t. one network's parameters.

    For ``which="generator"`` the batch-mean weights come from the generator;
    for ``which="evaluator"`` they are ``wbar`` (or the generator's, frozen).
    """
    images = np.asarray(images, dtype=np.float64)
    b = len(images)
    w = gen(images)
    if wbar is None:
        wbar = w.mean(axis=0)
    out = ev(wbar, images)
    ev.zero_grad()
    gen.zero_grad()
    g_wbar = ev.backward(np.full(b, 1.0 / b), encoder=which == "evaluator")
    if which == "generator":
        gen.backward(np.broadcast_to(g_wbar / b, w.shape))
        return float(np.mean(out)), gen.grads
    if which == "evaluator":
        return float(np.mean(out)), ev.grads
    raise ValueError(f"which must be 'generator' or 'evaluator', got {which!r}")


def finite_diff_check(
    gen: Generator,
    ev: Evaluator,
    images,
    which: str = "evaluator",
    probe_count: int = 100,
    seed: int = 0,
    h: float = 1e-5,
    floor: float = 1e-6,
) -> float:
    """Largest relative error between analytic and central-difference gradients.

    Probes ``probe_count`` random parameter coordinates (sampled in
    proportion to tensor size). The relative error of a probe is
    ``|a - n| / max(|a|, |n|, floor)``.
    """
    net = gen if which == "generator" else ev
    if any(p.dtype != np.float64 for p in net.params.values()):
        raise ValueError("gradient audit needs double-precision parameters")
    images = np.asarray(images, dtype=np.float64)
    wbar = None if which == "generator" else gen(images).mean(axis=0)
    _, grads = scalar_and_grads(gen, ev, images, which, wbar)
    grads = {k: v.copy() for k, v in grads.items()}
    params = net.params
    names = sorted(params)
    sizes = np.array([params[k].size for k in names], dtype=np.float64)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probe_count):
        name = names[rng.choice(len(names), p=sizes / sizes.sum())]
        p = params[name].reshape(-1)
        i = rng.integers(p.size)
        old = p[i]
        p[i] = old + h
        up = _scalar(gen, ev, images, wbar)
        p[i] = old - h
        down = _scalar(gen, ev, images, wbar)
        p[i] = old
        numeric = (up - down) / (2 * h)
        analytic = grads[name].reshape(-1)[i]
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)
        worst = max(worst, err)
    return worst
