"""Context-agnostic scan orders and resolution doubling of an existing curve."""

from __future__ import annotations

import numpy as np

from .grid import GridSize, InvalidSizeError
from .order import InvalidOrderError, SfcOrder, adjacent_steps, validate_order

__all__ = ["CURVE_KINDS", "UnsupportedSizeError", "hilbert_d2xy", "scale_order", "universal_order"]

CURVE_KINDS = ("raster", "serpentine", "hilbert")


class UnsupportedSizeError(InvalidSizeError):
    pass


def hilbert_d2xy(n: int, d: int) -> tuple[int, int]:
    """Hilbert index -> (row, col) on an n x n grid, n a power of two.

    Starts at (0, 0) and ends at (n - 1, 0).
    """
    x = y = 0
    s, t = 1, d
    while s < n:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x, y = s - 1 - x, s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t //= 4
        s *= 2
    return x, y


def universal_order(kind: str, size: GridSize | tuple[int, int] | int) -> SfcOrder:
    if isinstance(size, int):
        size = GridSize(size, size)
    elif not isinstance(size, GridSize):
        size = GridSize(*size)
    h, w = size.height, size.width
    if kind == "raster":
        px = np.arange(h * w)
    elif kind == "serpentine":
        grid = np.arange(h * w).reshape(h, w)
        grid[1::2] = grid[1::2, ::-1]
        px = grid.ravel()
    elif kind == "hilbert":
        if h != w or h & (h - 1):
            raise UnsupportedSizeError(f"hilbert order needs a square power-of-two grid, got {h}x{w}")
        px = np.array([r * w + c for r, c in (hilbert_d2xy(h, d) for d in range(h * w))])
    else:
        raise ValueError(f"unknown curve kind {kind!r}; expected one of {CURVE_KINDS}")
    return SfcOrder(size, px, kind=kind)


# 2x2 block cells in clockwise order, as (row offset, col offset)
_RING = ((0, 0), (0, 1), (1, 1), (1, 0))


def _side_cells(direction: tuple[int, int]) -> set[int]:
    """Ring indices of the two block cells on the side facing ``direction``."""
    dr, dc = direction
    return {i for i, (r, c) in enumerate(_RING) if (dr and r == (dr > 0)) or (dc and c == (dc > 0))}


def _block_route(entry: int, exit_side: tuple[int, int] | None) -> list[int]:
    """Walk the 4-ring from ``entry`` in the direction that ends on ``exit_side``.

    With ``exit_side`` None (last block) the route ending at the smaller cell wins.
    """
    cw = [(entry + i) % 4 for i in range(4)]
    ccw = [(entry - i) % 4 for i in range(4)]
    if exit_side is None:
        return cw if _RING[cw[-1]] < _RING[ccw[-1]] else ccw
    side = _side_cells(exit_side)
    for route in (cw, ccw):
        if route[-1] in side:
            return route
    raise AssertionError("no block route reaches the exit side")  # unreachable for valid input


def scale_order(order: SfcOrder) -> SfcOrder:
    """Double the resolution of a curve, keeping each parent's 4 children contiguous.

    Parent ``i`` becomes the 2x2 block visited at steps ``4i .. 4i+3``. Inside a
    block the route goes straight through, or turns left or right, depending
    on where the next parent lies; entry cells are fixed by the previous
    block's exit. The first block enters at its top-left child.
    """
    if not order.is_sfc:
        raise InvalidOrderError(f"{order.kind} order has non-adjacent steps and cannot be scaled")
    size = order.size
    coords = order.coords()
    if len(coords) > 1 and not adjacent_steps(order.pixels, size.width).all():
        raise InvalidOrderError("consecutive parents are not 4-adjacent")
    big = GridSize(2 * size.height, 2 * size.width, max_pixels=max(size.max_pixels, 4 * size.pixels))
    n = len(coords)
    out = np.empty(4 * n, dtype=np.int64)
    entry = 0
    for i in range(n):
        r, c = coords[i]
        exit_side = tuple(coords[i + 1] - coords[i]) if i + 1 < n else None
        route = _block_route(entry, exit_side)
        for j, k in enumerate(route):
            dr, dc = _RING[k]
            out[4 * i + j] = (2 * r + dr) * big.width + 2 * c + dc
        if exit_side is not None:
            # mirror the exit cell across the shared boundary
            er, ec = _RING[route[-1]]
            dr, dc = exit_side
            entry = _RING.index((er ^ (dr != 0), ec ^ (dc != 0)))
    return validate_order(SfcOrder(big, out, kind=order.kind))
