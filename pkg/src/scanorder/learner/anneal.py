"""Gradient-free baseline: simulated annealing directly on the edge weights."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cover_merge import cut_to_order, dafner_weights, merge, minimum_spanning_tree
from ..grid import GridSize, build_dual
from ..objectives import Objective, normalized_objective
from .networks import batch_mean_weights

__all__ = ["AnnealResult", "AnnealSchedule", "anneal", "mean_dafner_weights", "set_energy"]


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling from ``t_start`` to ``t_end`` (normalised-objective units).

    Left as ``None``, ``t_start`` is calibrated per run to ``heat`` times the
    mean energy increase of trial moves at the initial weights, and ``t_end``
    sits ``cooling_range`` below it. Calibration keeps one schedule usable for
    objectives whose move costs differ by orders of magnitude.
    """

    steps: int = 20_000
    t_start: float | None = None
    t_end: float | None = None
    cooling_range: float = 1e-3
    heat: float = 0.1
    step_scale: float = 1.0  # proposal std, relative to the std of the initial weights
    probes: int = 64  # trial moves used for calibration

    def temperature(self, step: int, t_start: float | None = None) -> float:
        t0 = self.t_start if t_start is None else t_start
        if t0 is None:
            raise ValueError("uncalibrated schedule: pass t_start")
        t1 = self.t_end if self.t_end is not None else t0 * self.cooling_range
        if self.steps <= 1:
            return t0
        return t0 * (t1 / t0) ** (step / (self.steps - 1))


@dataclass
class AnnealResult:
    weights: np.ndarray
    energy: float
    initial_weights: np.ndarray
    initial_energy: float
    best_trace: list[float] = field(default_factory=list)
    accepted: int = 0


def mean_dafner_weights(images) -> np.ndarray:
    """Image-set baseline: Dafner weights averaged over the set."""
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 2:
        images = images[None]
    return batch_mean_weights([dafner_weights(im) for im in images])


class _Energy:
    """Mean normalised objective of the induced order; memoised on the spanning tree."""

    def __init__(self, images: np.ndarray, kind: Objective):
        self.images = images
        self.kind = kind
        self.size = GridSize(*images.shape[1:])
        self.dual = build_dual(self.size)
        self._memo: dict[bytes, float] = {}

    def __call__(self, weights: np.ndarray) -> float:
        tree = minimum_spanning_tree(self.dual, weights)
        key = tree.tobytes()
        hit = self._memo.get(key)
        if hit is None:
            order = cut_to_order(merge(self.size, tree))
            hit = float(np.mean(normalized_objective(self.images, order, self.kind)))
            if len(self._memo) > 50_000:
                self._memo.clear()
            self._memo[key] = hit
        return hit


def set_energy(images, weights, kind: Objective = Objective()) -> float:
    images = np.asarray(images, dtype=np.float64)
    return _Energy(images if images.ndim == 3 else images[None], kind)(np.asarray(weights, dtype=np.float64))


def _calibrate(energy, w0, e0, sigma, probes, rng, fallback: float = 2e-3) -> float:
    """Mean uphill energy change of random single-coordinate moves from ``w0``."""
    ups = []
    for _ in range(probes):
        w = w0.copy()
        w[rng.integers(len(w))] += rng.normal(0.0, sigma)
        d = energy(w) - e0
        if d > 0:
            ups.append(d)
    return float(np.mean(ups)) if ups else fallback


def anneal(
    images,
    kind: Objective = Objective(),
    schedule: AnnealSchedule = AnnealSchedule(),
    seed: int = 0,
    init=None,
) -> AnnealResult:
    """Metropolis search over edge weights, one Gaussian coordinate move per step.

    Starts from the mean Dafner weights of the set (or ``init``), cools
    geometrically and returns the best weights seen.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 2:
        images = images[None]
    if images.ndim != 3 or len(images) == 0:
        raise ValueError("annealing needs a non-empty image set")
    rng = np.random.default_rng(seed)
    energy = _Energy(images, kind)
    w0 = mean_dafner_weights(images) if init is None else np.asarray(init, dtype=np.float64).copy()
    scale = float(np.std(w0)) or 1.0
    sigma = schedule.step_scale * scale

    cur = w0.copy()
    e_cur = e0 = energy(cur)
    t_start = schedule.t_start
    if t_start is None:
        t_start = schedule.heat * _calibrate(energy, w0, e0, sigma, schedule.probes if schedule.steps else 0, rng)
    best, e_best = cur.copy(), e_cur
    trace = [e_best]
    accepted = 0
    n = len(cur)
    coords = rng.integers(n, size=schedule.steps)
    moves = rng.normal(0.0, sigma, size=schedule.steps)
    draws = rng.random(schedule.steps)
    for step in range(schedule.steps):
        i = coords[step]
        old = cur[i]
        cur[i] = old + moves[step]
        e_new = energy(cur)
        delta = e_new - e_cur
        t = schedule.temperature(step, t_start)
        if delta <= 0 or draws[step] < math.exp(-delta / t):
            e_cur = e_new
            accepted += 1
            if e_cur < e_best:
                e_best = e_cur
                best = cur.copy()
        else:
            cur[i] = old
        trace.append(e_best)
    return AnnealResult(best, e_best, w0, e0, trace, accepted)
