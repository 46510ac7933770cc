"""Pixel grid, its 2x2 circuit cover, the dual graph over circuits and its line graph.

Conventions used throughout the package:

* pixels are addressed row-major, ``pixel = row * width + col``;
* circuits (2x2 blocks) are addressed row-major on the ``(H/2, W/2)`` lattice;
* dual edges are ordered with all horizontal edges first (row-major over
  their left circuit), then all vertical edges (row-major over their upper
  circuit). Weight vectors, pooled edge features and line-graph nodes all
  share this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "MAX_PIXELS",
    "Circuit",
    "DualGraph",
    "GridSize",
    "InvalidSizeError",
    "LineGraph",
    "PixelEdgeQuad",
    "build_dual",
    "build_line_graph",
    "circuit_cover",
    "circuit_of",
    "cross_edges",
    "quad_table",
]

MAX_PIXELS = 2**16

PixelEdge = tuple[int, int]


class InvalidSizeError(ValueError):
    """Grid dimensions that cannot be tiled by 2x2 circuits (or are too large)."""


@dataclass(frozen=True)
class GridSize:
    height: int
    width: int
    max_pixels: int = field(default=MAX_PIXELS, compare=False, repr=False)

    def __post_init__(self):
        h, w = self.height, self.width
        if int(h) != h or int(w) != w:
            raise InvalidSizeError(f"non-integer grid size {h}x{w}")
        if h < 2 or w < 2 or h % 2 or w % 2:
            raise InvalidSizeError(f"grid size must be even and >= 2, got {h}x{w}")
        if h * w > self.max_pixels:
            raise InvalidSizeError(f"{h}x{w} exceeds the {self.max_pixels}-pixel limit")

    @classmethod
    def of(cls, image) -> GridSize:
        shape = np.shape(image)
        if len(shape) != 2:
            raise InvalidSizeError(f"expected a 2-D grayscale array, got shape {shape}")
        return cls(int(shape[0]), int(shape[1]))

    @property
    def pixels(self) -> int:
        return self.height * self.width

    @property
    def lattice(self) -> tuple[int, int]:
        """Shape of the circuit lattice, ``(H/2, W/2)``."""
        return self.height // 2, self.width // 2

    @property
    def circuits(self) -> int:
        return self.pixels // 4

    @property
    def dual_edges(self) -> int:
        return (self.pixels - self.height - self.width) // 2

    def pixel(self, row: int, col: int) -> int:
        return row * self.width + col

    def coords(self, pixel: int) -> tuple[int, int]:
        return divmod(int(pixel), self.width)


@dataclass(frozen=True)
class DualGraph:
    """Graph whose vertices are the 2x2 circuits and whose edges join lattice neighbours."""

    dims: tuple[int, int]
    edges: np.ndarray  # (E, 2) int64, (smaller, larger)
    n_horizontal: int

    @property
    def n_vertices(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)


@dataclass(frozen=True)
class LineGraph:
    n_nodes: int
    edges: np.ndarray  # (M, 2) int64, i < j, lexicographically sorted

    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency (no self-loops)."""
        a = np.zeros((self.n_nodes, self.n_nodes))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a


class PixelEdgeQuad(NamedTuple):
    """The 4-cycle exchanged when two circuits merge.

    ``e`` and ``f`` are the facing sides of the two circuits (removed on merge),
    ``u`` and ``w`` the connecting edges across the boundary (added on merge).
    """

    e: PixelEdge
    f: PixelEdge
    u: PixelEdge
    w: PixelEdge


class Circuit(NamedTuple):
    pixels: tuple[int, int, int, int]  # clockwise from the top-left corner
    edges: tuple[PixelEdge, PixelEdge, PixelEdge, PixelEdge]


def _size(size) -> GridSize:
    if isinstance(size, GridSize):
        return size
    return GridSize(*size)


@lru_cache(maxsize=64)
def _dual(height: int, width: int) -> DualGraph:
    h2, w2 = height // 2, width // 2
    ids = np.arange(h2 * w2).reshape(h2, w2)
    horiz = np.stack([ids[:, :-1].ravel(), ids[:, 1:].ravel()], axis=1)
    vert = np.stack([ids[:-1, :].ravel(), ids[1:, :].ravel()], axis=1)
    edges = np.concatenate([horiz, vert]).astype(np.int64).reshape(-1, 2)
    edges.setflags(write=False)
    return DualGraph(dims=(h2, w2), edges=edges, n_horizontal=len(horiz))


def build_dual(size: GridSize | tuple[int, int]) -> DualGraph:
    size = _size(size)
    return _dual(size.height, size.width)


def circuit_of(size: GridSize, row: int, col: int) -> int:
    return (row // 2) * (size.width // 2) + col // 2


def circuit_cover(size: GridSize | tuple[int, int]) -> list[Circuit]:
    size = _size(size)
    h2, w2 = size.lattice
    cover = []
    for cr in range(h2):
        for cc in range(w2):
            r, c = 2 * cr, 2 * cc
            tl, tr = size.pixel(r, c), size.pixel(r, c + 1)
            bl, br = size.pixel(r + 1, c), size.pixel(r + 1, c + 1)
            cover.append(Circuit((tl, tr, br, bl), ((tl, tr), (tr, br), (bl, br), (tl, bl))))
    return cover


@lru_cache(maxsize=64)
def _quads(height: int, width: int) -> np.ndarray:
    """(E, 4, 2) pixel ids of e, f, u, w for every dual edge.

    The first pixel of ``e`` and ``u`` is shared, as is the second pixel of
    ``e`` and the first of ``w``; for horizontal edges
    e = (p, q), f = (s, t), u = (p, s), w = (q, t) with p above q.
    """
    dual = _dual(height, width)
    h2, w2 = dual.dims
    out = np.empty((dual.n_edges, 4, 2), dtype=np.int64)

    cr, cc = np.divmod(dual.edges[: dual.n_horizontal, 0], w2)
    r, c = 2 * cr, 2 * cc + 1  # top-right pixel of the left circuit
    p, q = r * width + c, (r + 1) * width + c
    s, t = p + 1, q + 1
    out[: dual.n_horizontal] = np.stack(
        [np.stack([p, q], 1), np.stack([s, t], 1), np.stack([p, s], 1), np.stack([q, t], 1)], 1
    )

    cr, cc = np.divmod(dual.edges[dual.n_horizontal :, 0], w2)
    r, c = 2 * cr + 1, 2 * cc  # bottom-left pixel of the upper circuit
    p, q = r * width + c, r * width + c + 1
    s, t = p + width, q + width
    out[dual.n_horizontal :] = np.stack(
        [np.stack([p, q], 1), np.stack([s, t], 1), np.stack([p, s], 1), np.stack([q, t], 1)], 1
    )
    out.setflags(write=False)
    return out


def quad_table(size: GridSize | tuple[int, int]) -> np.ndarray:
    """Vectorised form of :func:`cross_edges` for all dual edges at once."""
    size = _size(size)
    return _quads(size.height, size.width)


def cross_edges(dual_edge: int, size: GridSize | tuple[int, int]) -> PixelEdgeQuad:
    size = _size(size)
    if not 0 <= dual_edge < size.dual_edges:
        raise IndexError(f"dual edge {dual_edge} out of range for {size.height}x{size.width}")
    q = quad_table(size)[dual_edge]
    return PixelEdgeQuad(*(tuple(int(v) for v in pair) for pair in q))


@lru_cache(maxsize=64)
def _line_graph(height: int, width: int) -> LineGraph:
    dual = _dual(height, width)
    incident: list[list[int]] = [[] for _ in range(dual.n_vertices)]
    for eid, (a, b) in enumerate(dual.edges.tolist()):
        incident[a].append(eid)
        incident[b].append(eid)
    pairs = set()
    for edges in incident:
        for i, a in enumerate(edges):
            for b in edges[i + 1 :]:
                pairs.add((min(a, b), max(a, b)))
    arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    arr.setflags(write=False)
    return LineGraph(n_nodes=dual.n_edges, edges=arr)


def build_line_graph(dual: DualGraph) -> LineGraph:
    h2, w2 = dual.dims
    return _line_graph(2 * h2, 2 * w2)
