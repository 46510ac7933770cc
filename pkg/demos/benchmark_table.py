"""Locality of universal and set-level scan orders on two image sets.

For each dataset every test image is zero-padded to 32x32 and read along
each order; we report mean lag-6 and lag-10 autocorrelation and mean LZW
size. ``mean-dafner`` is one order for the whole set, built from Dafner
weights averaged over all images; ``dafner`` gives each image its own order
and is an upper reference rather than a set-level curve.

    python demos/benchmark_table.py [--limit N]
"""

import argparse
from pathlib import Path

import numpy as np

from scanorder.io import DatasetSpec, benchmark, find_idx, load_dataset

DATA = Path(__file__).resolve().parents[1] / "data"

parser = argparse.ArgumentParser()
parser.add_argument("--limit", type=int, default=2000, help="random images per dataset (0 = all)")
args = parser.parse_args()

for name in ("mnist", "fashion-mnist"):
    images, labels = find_idx(name, "test", DATA)
    batch = load_dataset(DatasetSpec(str(images), str(labels), pad_to=32))
    # the files are grouped by class, so sample rather than take a prefix
    if args.limit and args.limit < len(batch):
        keep = np.sort(np.random.default_rng(0).choice(len(batch), args.limit, replace=False))
        batch = batch.select(keep)
    rows = benchmark(batch.images, ["raster", "hilbert", "mean-dafner", "dafner"], lags=(6, 10))
    print(f"\n{name} ({len(batch)} images)")
    print(f"  {'order':<12} {'rho6':>6} {'rho10':>6} {'lzw':>7}")
    for r in rows:
        print(f"  {r.order:<12} {r.rho[6]:6.3f} {r.rho[10]:6.3f} {r.lzw_bytes:7.1f}")
