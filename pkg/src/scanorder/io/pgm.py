"""Binary portable graymap (P5) reading and writing."""

from __future__ import annotations

import os
import re

import numpy as np

__all__ = ["PGMError", "load_pgm_dir", "read_pgm", "write_pgm"]

_TOKEN = re.compile(rb"(#[^\n]*\n)|(\S+)")


class PGMError(ValueError):
    pass


def _header(raw: bytes, path) -> tuple[list[int], int]:
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        m = _TOKEN.search(raw, pos)
        if m is None:
            raise PGMError(f"{path}: truncated header")
        pos = m.end()
        if m.group(2):
            tokens.append(m.group(2))
    if tokens[0] != b"P5":
        raise PGMError(f"{path}: not a binary graymap (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PGMError(f"{path}: malformed header") from exc
    if not 0 < maxval < 65536:
        raise PGMError(f"{path}: maxval {maxval} out of range")
    # exactly one whitespace byte separates the header from the raster
    return [width, height, maxval], pos + 1


def read_pgm(path) -> np.ndarray:
    """Grayscale image as float64 in [0, 1]."""
    with open(path, "rb") as fh:
        raw = fh.read()
    (width, height, maxval), start = _header(raw, path)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    need = width * height * dtype.itemsize
    if len(raw) - start < need:
        raise PGMError(f"{path}: raster truncated at byte offset {len(raw)}, need {start + need}")
    data = np.frombuffer(raw, dtype=dtype, count=width * height, offset=start)
    return data.reshape(height, width).astype(np.float64) / maxval


def write_pgm(path, image, maxval: int = 255) -> None:
    img = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    if img.ndim != 2:
        raise PGMError(f"expected a 2-D image, got shape {img.shape}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    data = np.rint(img * maxval).astype(dtype)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode())
        fh.write(data.tobytes())


def load_pgm_dir(directory) -> np.ndarray:
    """All ``*.pgm`` files of a directory, sorted by name, as an (N, H, W) stack."""
    names = sorted(n for n in os.listdir(directory) if n.lower().endswith(".pgm"))
    if not names:
        raise PGMError(f"{directory}: no .pgm files")
    images = [read_pgm(os.path.join(directory, n)) for n in names]
    shapes = {im.shape for im in images}
    if len(shapes) != 1:
        raise PGMError(f"{directory}: images differ in size: {sorted(shapes)}")
    return np.stack(images)
