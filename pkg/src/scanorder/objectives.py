"""Scoring an image (or image set) read along a scan order."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSize
from .lzw import lzw_length
from .order import SfcOrder

__all__ = [
    "AUTOCORRELATION",
    "LZW",
    "Objective",
    "UndefinedObjectiveError",
    "autocorrelation",
    "flatten",
    "normalize",
    "normalized_objective",
    "objective",
    "quantize",
    "sequence_lzw_length",
    "to_grayscale",
    "unflatten",
]

AUTOCORRELATION = "neg_autocorrelation"
LZW = "lzw_length"
EPS = 1e-4


class UndefinedObjectiveError(ValueError):
    pass


@dataclass(frozen=True)
class Objective:
    """Which quantity to minimise.

    ``neg_autocorrelation`` minimises ``-rho_k``; with several lags the
    normalised values are averaged evenly. ``lzw_length`` minimises the code
    length in bytes.
    """

    name: str = AUTOCORRELATION
    lags: tuple[int, ...] = (6,)

    def __post_init__(self):
        if self.name not in (AUTOCORRELATION, LZW):
            raise ValueError(f"unknown objective {self.name!r}")
        lags = (self.lags,) if isinstance(self.lags, int) else tuple(self.lags)
        if self.name == AUTOCORRELATION and (not lags or min(lags) < 1):
            raise ValueError(f"lags must be positive, got {lags}")
        object.__setattr__(self, "lags", lags)

    @classmethod
    def parse(cls, tag: str, lag: int | tuple[int, ...] = 6) -> Objective:
        """Accepts the short command-line tags ``ac`` and ``lzw``."""
        return cls({"ac": AUTOCORRELATION, "lzw": LZW}.get(tag, tag), lag)


def to_grayscale(image) -> np.ndarray:
    """Luminance (ITU-R BT.601) of an RGB(A) image; 2-D input passes through."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 3 and img.shape[-1] in (3, 4):
        return img[..., :3] @ np.array([0.299, 0.587, 0.114])
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale or HxWx3 color image, got shape {img.shape}")
    return img


def _check(image, order: SfcOrder) -> np.ndarray:
    img = np.asarray(image)
    if img.shape[-2:] != (order.size.height, order.size.width):
        raise ValueError(f"image shape {img.shape[-2:]} does not match {order.size.height}x{order.size.width} order")
    return img


def flatten(image, order: SfcOrder) -> np.ndarray:
    """Pixel values along the order; also accepts a stack ``(N, H, W)``."""
    img = _check(image, order)
    return img.reshape(*img.shape[:-2], -1)[..., order.pixels]


def unflatten(seq, order: SfcOrder) -> np.ndarray:
    seq = np.asarray(seq)
    out = np.empty_like(seq)
    out[..., order.pixels] = seq
    return out.reshape(*seq.shape[:-1], order.size.height, order.size.width)


def autocorrelation(seq, k: int) -> np.ndarray | float:
    """``sum(y[i] * y[i+k]) / sum(y[i]**2)`` over the last axis, no mean removal."""
    y = np.asarray(seq, dtype=np.float64)
    n = y.shape[-1]
    if not 0 < k < n:
        raise ValueError(f"lag must satisfy 0 < k < {n}, got {k}")
    denom = np.einsum("...i,...i->...", y, y)
    if np.any(denom <= 0):
        raise UndefinedObjectiveError("autocorrelation of an all-zero sequence is undefined")
    num = np.einsum("...i,...i->...", y[..., :-k], y[..., k:])
    out = num / denom
    return float(out) if np.ndim(out) == 0 else out


def quantize(seq) -> bytes:
    """[0, 1] values -> 8-bit bytes."""
    y = np.clip(np.rint(np.asarray(seq, dtype=np.float64) * 255.0), 0, 255)
    return y.astype(np.uint8).tobytes()


def sequence_lzw_length(seq) -> int:
    return lzw_length(quantize(seq))


def _lzw_lengths(seqs: np.ndarray) -> np.ndarray:
    if seqs.ndim == 1:
        return np.float64(sequence_lzw_length(seqs))
    flat = seqs.reshape(-1, seqs.shape[-1])
    return np.array([sequence_lzw_length(s) for s in flat], dtype=np.float64).reshape(seqs.shape[:-1])


def objective(image, order: SfcOrder, kind: Objective = Objective()):
    """Raw value to minimise: ``-mean_k rho_k`` or the LZW length in bytes."""
    seq = flatten(image, order)
    if kind.name == LZW:
        return _lzw_lengths(seq)
    return -np.mean([autocorrelation(seq, k) for k in kind.lags], axis=0)


def normalize(value, kind: Objective, size: GridSize):
    """Monotone map of a raw objective value into the open unit interval.

    ``-rho`` maps to ``(1 - rho) / 2``; an LZW length ``L`` maps to
    ``L / (2 H W)`` clipped to ``(1e-4, 1 - 1e-4)``.
    """
    value = np.asarray(value, dtype=np.float64)
    if kind.name == LZW:
        out = np.clip(value / (2.0 * size.pixels), EPS, 1.0 - EPS)
    else:
        out = (1.0 + value) / 2.0
    return float(out) if out.ndim == 0 else out


def normalized_objective(image, order: SfcOrder, kind: Objective = Objective()):
    return normalize(objective(image, order, kind), kind, order.size)
