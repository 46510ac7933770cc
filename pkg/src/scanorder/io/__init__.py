"""Image and curve file formats, dataset preparation, benchmarking and rendering."""

from .bench import BenchRow, benchmark, to_csv
from .curvefile import CurveFile, CurveFileError, read_curve, write_curve
from .datasets import DataError, DatasetSpec, center_crop, find_idx, load_dataset, pad_images
from .idx import IDXError, ImageBatch, load_idx, load_idx_pair, read_idx, write_idx
from .pgm import PGMError, load_pgm_dir, read_pgm, write_pgm
from .render import render_overlay, render_strip

__all__ = [
    "BenchRow",
    "CurveFile",
    "CurveFileError",
    "DataError",
    "DatasetSpec",
    "IDXError",
    "ImageBatch",
    "PGMError",
    "benchmark",
    "center_crop",
    "find_idx",
    "load_dataset",
    "load_idx",
    "load_idx_pair",
    "load_pgm_dir",
    "pad_images",
    "read_curve",
    "read_idx",
    "read_pgm",
    "render_overlay",
    "render_strip",
    "to_csv",
    "write_curve",
    "write_idx",
    "write_pgm",
]
