"""Rebuild data/ from the JSON digit/clothing dumps shipped in two npm packages.

    python scripts/build_data.py --mnist path/to/mnist/package --fashion path/to/fashion-mnist/package

``mnist`` (npm) stores, per class, images as flat lists of intensities rounded
to three decimals; ``round(v * 255)`` recovers the original byte exactly. The
10000 images are the first 10000 of the MNIST training file, so they stand in
for the test split under ``data/mnist/t10k-*``.

``fashion-mnist`` (npm) stores raw bytes; each class file holds its 1000 test
images followed by its 6000 training images. Class 0 carries a stray scalar at
positions 1000 and 7001, which are dropped. Only the test split is written.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from scanorder.io.idx import write_idx

SIDE = 28


def _mnist(root: Path) -> tuple[np.ndarray, np.ndarray]:
    images, labels = [], []
    for c in range(10):
        flat = np.asarray(json.loads((root / "src" / "digits" / f"{c}.json").read_text())["data"], dtype=np.float64)
        px = np.rint(flat * 255).astype(np.uint8).reshape(-1, SIDE, SIDE)
        images.append(px)
        labels.append(np.full(len(px), c, dtype=np.uint8))
    return np.concatenate(images), np.concatenate(labels)


def _fashion(root: Path, per_class: int = 1000) -> tuple[np.ndarray, np.ndarray]:
    images, labels = [], []
    for c in range(10):
        rows = json.loads((root / "src" / "clothes" / f"{c}.json").read_text())["data"]
        rows = [r for r in rows if isinstance(r, list) and len(r) == SIDE * SIDE]
        px = np.asarray(rows[:per_class], dtype=np.uint8).reshape(-1, SIDE, SIDE)
        images.append(px)
        labels.append(np.full(len(px), c, dtype=np.uint8))
    return np.concatenate(images), np.concatenate(labels)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mnist", type=Path)
    ap.add_argument("--fashion", type=Path)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    args = ap.parse_args()
    for name, root, fn in (("mnist", args.mnist, _mnist), ("fashion-mnist", args.fashion, _fashion)):
        if root is None:
            continue
        images, labels = fn(root)
        dest = args.out / name
        dest.mkdir(parents=True, exist_ok=True)
        write_idx(dest / "t10k-images-idx3-ubyte.gz", images)
        write_idx(dest / "t10k-labels-idx1-ubyte.gz", labels)
        print(f"{name}: {len(images)} images, class counts {np.bincount(labels).tolist()}")


if __name__ == "__main__":
    main()
