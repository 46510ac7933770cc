"""Reader and writer for the IDX files MNIST-style datasets ship in.

Layout (big-endian)::

    [0:2]   zero
    [2]     element type (0x08 = unsigned byte)
    [3]     number of dimensions
    [4:..]  one uint32 per dimension
    [...]   payload, row-major

Images use magic ``0x00000803`` (3 dims), labels ``0x00000801`` (1 dim).
Files ending in ``.gz`` are transparently (de)compressed.
"""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass

import numpy as np

__all__ = ["IDXError", "ImageBatch", "load_idx", "load_idx_pair", "read_idx", "write_idx"]

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class IDXError(ValueError):
    pass


@dataclass
class ImageBatch:
    """Same-sized grayscale images with values in [0, 1], optionally labelled."""

    images: np.ndarray  # (N, H, W) float64
    labels: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.images)

    def select(self, mask_or_index) -> ImageBatch:
        labels = None if self.labels is None else self.labels[mask_or_index]
        return ImageBatch(self.images[mask_or_index], labels)

    def of_class(self, label: int) -> ImageBatch:
        if self.labels is None:
            raise ValueError("batch has no labels")
        return self.select(self.labels == label)


def _read_bytes(path) -> bytes:
    with open(path, "rb") as fh:
        raw = fh.read()
    if str(path).endswith(".gz"):
        raw = gzip.decompress(raw)
    return raw


def read_idx(path) -> np.ndarray:
    """Raw unsigned-byte array with the shape recorded in the header."""
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise IDXError(f"{path}: truncated header, file is {len(raw)} bytes")
    zero, dtype, ndim = struct.unpack(">HBB", raw[:4])
    magic = (dtype << 8) | ndim
    if zero != 0 or magic not in (IMAGES_MAGIC, LABELS_MAGIC):
        raise IDXError(f"{path}: bad magic number 0x{struct.unpack('>I', raw[:4])[0]:08x}")
    header_end = 4 + 4 * ndim
    if len(raw) < header_end:
        raise IDXError(f"{path}: truncated header, expected {header_end} bytes, file ends at byte offset {len(raw)}")
    dims = struct.unpack(f">{ndim}I", raw[4:header_end])
    expected = header_end + int(np.prod(dims))
    if len(raw) < expected:
        raise IDXError(f"{path}: truncated payload, expected {expected} bytes, data ends at byte offset {len(raw)}")
    return np.frombuffer(raw, dtype=np.uint8, count=expected - header_end, offset=header_end).reshape(dims)


def write_idx(path, array) -> None:
    arr = np.asarray(array)
    if arr.dtype != np.uint8:
        raise IDXError("only unsigned-byte IDX payloads are supported")
    if arr.ndim not in (1, 3):
        raise IDXError("IDX arrays must be 1-D labels or 3-D images")
    header = struct.pack(">HBB", 0, 0x08, arr.ndim) + struct.pack(f">{arr.ndim}I", *arr.shape)
    blob = header + np.ascontiguousarray(arr).tobytes()
    if str(path).endswith(".gz"):
        blob = gzip.compress(blob, mtime=0)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(blob)


def load_idx(path) -> np.ndarray:
    """Images as float64 in [0, 1] (or labels as int64 for a label file)."""
    arr = read_idx(path)
    if arr.ndim == 1:
        return arr.astype(np.int64)
    if arr.ndim != 3:
        raise IDXError(f"{path}: expected 3-D image data, got {arr.ndim} dimensions")
    return arr.astype(np.float64) / 255.0


def load_idx_pair(images_path, labels_path=None) -> ImageBatch:
    images = load_idx(images_path)
    if images.ndim != 3:
        raise IDXError(f"{images_path}: not an image file")
    labels = None
    if labels_path is not None:
        labels = load_idx(labels_path)
        if labels.ndim != 1 or len(labels) != len(images):
            raise IDXError(f"{labels_path}: {len(labels)} labels for {len(images)} images")
    return ImageBatch(images, labels)
