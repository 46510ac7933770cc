"""Figure-style emitters: curve overlays (SVG) and one-row flattened strips."""

from __future__ import annotations

import numpy as np

from ..objectives import flatten
from ..order import SfcOrder

__all__ = ["overlay_points", "render_overlay", "render_strip"]


def overlay_points(order: SfcOrder, cell: float = 1.0) -> np.ndarray:
    """Pixel-centre coordinates (x, y) along the order."""
    rc = order.coords().astype(np.float64)
    return np.stack([(rc[:, 1] + 0.5) * cell, (rc[:, 0] + 0.5) * cell], axis=1)


def render_overlay(image, order: SfcOrder, cell: int = 12, color: str = "#e0301e") -> str:
    """SVG document: the image as gray cells with the curve drawn through pixel centres."""
    img = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    h, w = order.size.height, order.size.width
    if img.shape != (h, w):
        raise ValueError(f"image shape {img.shape} does not match {h}x{w} order")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell}" height="{h * cell}" '
        f'viewBox="0 0 {w * cell} {h * cell}" shape-rendering="crispEdges">'
    ]
    for r in range(h):
        for c in range(w):
            g = int(round(img[r, c] * 255))
            parts.append(
                f'<rect x="{c * cell}" y="{r * cell}" width="{cell}" height="{cell}" fill="rgb({g},{g},{g})"/>'
            )
    pts = " ".join(f"{x:g},{y:g}" for x, y in overlay_points(order, cell))
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{max(cell / 6, 1):g}" '
        'stroke-linejoin="round"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def render_strip(image, order: SfcOrder) -> np.ndarray:
    """The flattened pixel sequence as a 1 x HW image."""
    return np.asarray(flatten(image, order), dtype=np.float64)[None, :]
