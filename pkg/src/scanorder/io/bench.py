"""Locality and compression benchmark over a set of scan orders.

One CSV row per order with columns::

    order, kind, images, rho_<k> (one per lag), lzw_bytes, note

``rho_<k>`` is the mean lag-k autocorrelation over the images and
``lzw_bytes`` the mean LZW length in bytes (empty when LZW is off). The
special order name ``dafner`` scores every image along its own per-image
order; ``mean-dafner`` uses one order built from the mean Dafner weights of
the whole set.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import repeat

import numpy as np

from ..cover_merge import dafner_weights, sfc_from_weights
from ..curves import universal_order
from ..grid import GridSize
from ..objectives import _lzw_lengths, autocorrelation, flatten
from ..order import SfcOrder
from .datasets import DatasetSpec, load_dataset

__all__ = ["PER_IMAGE", "BenchRow", "benchmark", "resolve_orders", "to_csv"]

PER_IMAGE = "dafner"
CHUNK = 256


@dataclass
class BenchRow:
    order: str
    kind: str
    images: int
    rho: dict[int, float]
    lzw_bytes: float | None = None
    note: str = ""

    def cells(self, lags) -> list:
        lz = "" if self.lzw_bytes is None else f"{self.lzw_bytes:.2f}"
        return [self.order, self.kind, self.images, *(f"{self.rho[k]:.6f}" for k in lags), lz, self.note]


@dataclass
class _Sums:
    rho: np.ndarray
    lzw: float = 0.0
    n: int = 0

    def __add__(self, other: _Sums) -> _Sums:
        return _Sums(self.rho + other.rho, self.lzw + other.lzw, self.n + other.n)


def resolve_orders(names, size: GridSize, images=None) -> list[tuple[str, SfcOrder | None]]:
    """Map order names (universal kinds, ``dafner``, ``mean-dafner``) to orders.

    Already-built :class:`SfcOrder` objects pass through under their kind tag.
    ``dafner`` resolves to ``None``: the order is built per image.
    """
    out = []
    for item in names:
        if isinstance(item, SfcOrder):
            out.append((item.kind, item))
        elif isinstance(item, tuple):
            out.append(item)
        elif item == PER_IMAGE:
            out.append((item, None))
        elif item == "mean-dafner":
            if images is None:
                raise ValueError("mean-dafner needs the image set")
            w = np.mean([dafner_weights(im) for im in images], axis=0)
            out.append((item, SfcOrder(size, sfc_from_weights(size, w).pixels, kind="mean-dafner")))
        else:
            out.append((item, universal_order(item, size)))
    return out


def _score_chunk(images: np.ndarray, order: SfcOrder | None, lags, with_lzw: bool) -> _Sums:
    if order is None:
        size = GridSize.of(images[0])
        seqs = np.stack([flatten(im, sfc_from_weights(size, dafner_weights(im))) for im in images])
    else:
        seqs = flatten(images, order)
    rho = np.array([autocorrelation(seqs, k).sum() for k in lags])
    lz = float(_lzw_lengths(seqs).sum()) if with_lzw else 0.0
    return _Sums(rho, lz, len(images))


def benchmark(
    dataset,
    orders,
    lags=(6, 10),
    with_lzw: bool = True,
    threads: int = 1,
) -> list[BenchRow]:
    """Score every order on every image and average.

    ``dataset`` is a :class:`DatasetSpec` or an (N, H, W) array. Images are
    split into fixed chunks and the chunk sums are added in chunk order, so
    results do not depend on ``threads``.
    """
    images = load_dataset(dataset).images if isinstance(dataset, DatasetSpec) else np.asarray(dataset, dtype=np.float64)
    if images.ndim != 3 or len(images) == 0:
        raise ValueError(f"expected a non-empty (N, H, W) stack, got shape {images.shape}")
    lags = tuple(int(k) for k in lags)
    size = GridSize.of(images[0])
    chunks = [images[i : i + CHUNK] for i in range(0, len(images), CHUNK)]
    rows = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for name, order in resolve_orders(orders, size, images):
            parts = list(pool.map(_score_chunk, chunks, repeat(order), repeat(lags), repeat(with_lzw)))
            total = parts[0]
            for p in parts[1:]:
                total = total + p
            n = total.n
            kind = "per-image" if order is None else order.kind
            note = "per-image order: each image read along its own Dafner curve" if order is None else ""
            rows.append(
                BenchRow(
                    name,
                    kind,
                    n,
                    {k: float(r / n) for k, r in zip(lags, total.rho)},
                    total.lzw / n if with_lzw else None,
                    note,
                )
            )
    return rows


def to_csv(rows: list[BenchRow], lags, fh=None) -> str:
    lags = tuple(lags)
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["order", "kind", "images", *(f"rho_{k}" for k in lags), "lzw_bytes", "note"])
    for row in rows:
        w.writerow(row.cells(lags))
    return buf.getvalue() if fh is None else ""
