"""Dataset descriptions, discovery and zero padding."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..grid import GridSize
from ..objectives import to_grayscale
from .idx import ImageBatch, load_idx_pair
from .pgm import load_pgm_dir

__all__ = [
    "DATA_ENV",
    "DataError",
    "DatasetSpec",
    "center_crop",
    "data_dir",
    "find_idx",
    "load_dataset",
    "pad_images",
]

DATA_ENV = "SCANORDER_DATA"


class DataError(ValueError):
    pass


def data_dir() -> Path:
    """Default data directory: ``$SCANORDER_DATA``, else ``./data``."""
    return Path(os.environ.get(DATA_ENV, "data"))


def find_idx(name: str, split: str = "test", root=None) -> tuple[Path, Path | None]:
    """Locate the IDX image/label pair of a dataset under the data directory.

    Looks in ``<root>/<name>/`` for the canonical file names
    (``t10k-*`` for the test split, ``train-*`` for training), with or
    without ``.gz``.
    """
    root = Path(root) if root is not None else data_dir()
    prefix = {"test": "t10k", "train": "train"}.get(split, split)
    base = root / name
    for suffix in ("", ".gz"):
        images = base / f"{prefix}-images-idx3-ubyte{suffix}"
        if images.exists():
            labels = base / f"{prefix}-labels-idx1-ubyte{suffix}"
            return images, labels if labels.exists() else None
    raise DataError(f"no {split} IDX files for {name!r} under {base}")


def pad_images(images, target) -> np.ndarray:
    """Zero-pad an (N, H, W) stack to ``target``, centring the source.

    An odd margin puts the extra row/column at the bottom/right.
    """
    x = np.asarray(images, dtype=np.float64)
    single = x.ndim == 2
    if single:
        x = x[None]
    if isinstance(target, int):
        target = GridSize(target, target)
    elif not isinstance(target, GridSize):
        target = GridSize(*target)
    h, w = x.shape[1:]
    if target.height < h or target.width < w:
        raise DataError(f"cannot pad {h}x{w} images down to {target.height}x{target.width}")
    top, left = (target.height - h) // 2, (target.width - w) // 2
    out = np.zeros((len(x), target.height, target.width))
    out[:, top : top + h, left : left + w] = x
    return out[0] if single else out


def center_crop(images, size: int) -> np.ndarray:
    x = np.asarray(images, dtype=np.float64)
    h, w = x.shape[-2:]
    if size > min(h, w):
        raise DataError(f"crop {size} larger than {h}x{w}")
    top, left = (h - size) // 2, (w - size) // 2
    return x[..., top : top + size, left : left + size]


@dataclass(frozen=True)
class DatasetSpec:
    """Where images come from and how to prepare them.

    ``source`` is an IDX image file (``labels`` optional) or a directory of
    binary graymaps. ``test_fraction`` > 0 splits the set with a fixed seed;
    ``split`` then picks ``"train"``, ``"test"`` or ``"all"``.
    """

    source: str
    labels: str | None = None
    class_filter: int | None = None
    pad_to: int | None = None
    limit: int | None = None
    split: str = "all"
    test_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not Path(self.source).exists():
            raise DataError(f"{self.source}: no such file or directory")
        if self.labels is not None and not Path(self.labels).exists():
            raise DataError(f"{self.labels}: no such file")
        if self.pad_to is not None and self.pad_to % 2:
            raise DataError(f"pad target must be even, got {self.pad_to}")
        if self.split not in ("all", "train", "test"):
            raise DataError(f"unknown split {self.split!r}")


def load_dataset(spec: DatasetSpec) -> ImageBatch:
    src = Path(spec.source)
    if src.is_dir():
        imgs = load_pgm_dir(src)
        batch = ImageBatch(np.stack([to_grayscale(im) for im in imgs]))
    else:
        batch = load_idx_pair(src, spec.labels)
    if spec.class_filter is not None:
        if batch.labels is None:
            raise DataError("class filter given but the dataset has no labels")
        batch = batch.of_class(spec.class_filter)
    if spec.test_fraction > 0 and spec.split != "all":
        perm = np.random.default_rng(spec.seed).permutation(len(batch))
        n_test = int(round(spec.test_fraction * len(batch)))
        batch = batch.select(np.sort(perm[:n_test] if spec.split == "test" else perm[n_test:]))
    if spec.limit is not None:
        batch = batch.select(slice(0, spec.limit))
    if spec.pad_to is not None:
        batch = ImageBatch(pad_images(batch.images, spec.pad_to), batch.labels)
    if len(batch) == 0:
        raise DataError(f"{spec.source}: no images left after filtering")
    return batch
