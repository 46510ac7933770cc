"""Cover and merge: edge weights -> minimum spanning tree -> Hamiltonian circuit -> scan order."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import DualGraph, GridSize, build_dual, quad_table
from .order import SfcOrder

__all__ = [
    "HamiltonianCircuit",
    "TreeError",
    "cut_to_order",
    "dafner_weights",
    "merge",
    "minimum_spanning_tree",
    "sfc_from_weights",
    "tree_weight",
]


class TreeError(ValueError):
    """Edge set handed to :func:`merge` is not a spanning tree of the dual graph."""


@dataclass(frozen=True, eq=False)
class HamiltonianCircuit:
    """A single cycle through every pixel, stored as an oriented successor array.

    Every 2x2 circuit of the cover starts out clockwise. An exchange replaces
    two facing sides by the two connecting edges with the same orientation, so
    the merged cycle stays consistently oriented and ``succ`` is a single
    cyclic permutation. Each pixel's two cycle neighbours are ``succ[p]`` and
    ``pred[p]``.
    """

    size: GridSize
    succ: np.ndarray

    def pred(self) -> np.ndarray:
        p = np.empty_like(self.succ)
        p[self.succ] = np.arange(len(self.succ))
        return p

    def neighbors(self) -> np.ndarray:
        return np.stack([self.succ, self.pred()], axis=1)

    def edges(self) -> set[tuple[int, int]]:
        return {(min(a, b), max(a, b)) for a, b in enumerate(self.succ.tolist())}


def _as_weights(weights, n_edges: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n_edges,):
        raise ValueError(f"expected {n_edges} edge weights, got shape {w.shape}")
    if not np.isfinite(w).all():
        raise ValueError("edge weights must be finite")
    return w


def dafner_weights(image) -> np.ndarray:
    """Cost of every merge: ``|u| + |w| - |e| - |f|`` in pixel-intensity units."""
    img = np.asarray(image, dtype=np.float64)
    size = GridSize.of(img)
    flat = img.ravel()
    q = quad_table(size)
    diff = np.abs(flat[q[:, :, 0]] - flat[q[:, :, 1]])  # (E, 4): e, f, u, w
    return diff[:, 2] + diff[:, 3] - diff[:, 0] - diff[:, 1]


@lru_cache(maxsize=64)
def _incidence(height: int, width: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    dual = build_dual((height, width))
    adj: list[list[tuple[int, int]]] = [[] for _ in range(dual.n_vertices)]
    for eid, (a, b) in enumerate(dual.edges.tolist()):
        adj[a].append((eid, b))
        adj[b].append((eid, a))
    return tuple(tuple(x) for x in adj)


def minimum_spanning_tree(dual: DualGraph, weights) -> np.ndarray:
    """Prim's algorithm from circuit 0 with a binary heap.

    Heap keys are ``(weight, edge id)``, so ties go to the smaller edge id and
    the returned tree is the unique minimum under that lexicographic order.
    Returns the sorted tree edge ids.
    """
    w = _as_weights(weights, dual.n_edges).tolist()
    h2, w2 = dual.dims
    adj = _incidence(2 * h2, 2 * w2)
    n = dual.n_vertices
    seen = [False] * n
    seen[0] = True
    heap = [(w[e], e, v) for e, v in adj[0]]
    heapq.heapify(heap)
    tree = []
    while heap and len(tree) < n - 1:
        _, e, v = heapq.heappop(heap)
        if seen[v]:
            continue
        seen[v] = True
        tree.append(e)
        for e2, v2 in adj[v]:
            if not seen[v2]:
                heapq.heappush(heap, (w[e2], e2, v2))
    tree.sort()
    return np.array(tree, dtype=np.int64)


def tree_weight(tree, weights) -> float:
    return float(np.asarray(weights, dtype=np.float64)[np.asarray(tree, dtype=np.int64)].sum())


@lru_cache(maxsize=64)
def _base_succ(height: int, width: int) -> np.ndarray:
    # clockwise TL -> TR -> BR -> BL -> TL in every circuit
    r, c = np.divmod(np.arange(height * width), width)
    top, left = r % 2 == 0, c % 2 == 0
    succ = np.where(
        top,
        np.where(left, r * width + c + 1, (r + 1) * width + c),
        np.where(left, (r - 1) * width + c, r * width + c - 1),
    )
    succ.setflags(write=False)
    return succ


@lru_cache(maxsize=64)
def _exchange_slots(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Per dual edge, the two pixels whose successor changes and their new successors."""
    q = quad_table((height, width))
    n_h = build_dual((height, width)).n_horizontal
    p, qq, s, t = q[:, 0, 0], q[:, 0, 1], q[:, 1, 0], q[:, 1, 1]
    src = np.empty((len(q), 2), dtype=np.int64)
    dst = np.empty((len(q), 2), dtype=np.int64)
    # horizontal: p->q and t->s become p->s and t->q
    src[:n_h] = np.stack([p[:n_h], t[:n_h]], 1)
    dst[:n_h] = np.stack([s[:n_h], qq[:n_h]], 1)
    # vertical: q->p and s->t become q->t and s->p
    src[n_h:] = np.stack([qq[n_h:], s[n_h:]], 1)
    dst[n_h:] = np.stack([t[n_h:], p[n_h:]], 1)
    return src, dst


def _check_tree(tree: np.ndarray, dual: DualGraph) -> None:
    n = dual.n_vertices
    if len(tree) != n - 1:
        raise TreeError(f"spanning tree needs {n - 1} edges, got {len(tree)}")
    if len(tree) and (tree.min() < 0 or tree.max() >= dual.n_edges):
        raise TreeError("tree references a non-existent dual edge")
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in dual.edges[tree].tolist():
        ra, rb = find(a), find(b)
        if ra == rb:
            raise TreeError(f"tree edges contain a cycle through circuits {a} and {b}")
        parent[ra] = rb


def merge(size: GridSize, tree) -> HamiltonianCircuit:
    """Fuse all circuits along the tree edges into one Hamiltonian circuit.

    Each circuit side faces exactly one neighbour, so the exchanges of
    different tree edges touch disjoint successor slots and are applied in
    one vectorised step.
    """
    size = size if isinstance(size, GridSize) else GridSize(*size)
    tree = np.asarray(tree, dtype=np.int64).ravel()
    _check_tree(tree, build_dual(size))
    src, dst = _exchange_slots(size.height, size.width)
    succ = _base_succ(size.height, size.width).copy()
    succ[src[tree].ravel()] = dst[tree].ravel()
    return HamiltonianCircuit(size, succ)


def cut_to_order(circuit: HamiltonianCircuit) -> SfcOrder:
    """Open the circuit at pixel 0, heading first towards its smaller neighbour."""
    succ = circuit.succ
    n = len(succ)
    nxt = succ.tolist()
    start_next = nxt[0]
    back = int(np.flatnonzero(succ == 0)[0])
    if back < start_next:
        nxt = circuit.pred().tolist()
    out = [0] * n
    v = 0
    for i in range(1, n):
        v = nxt[v]
        out[i] = v
    return SfcOrder(circuit.size, np.array(out, dtype=np.int64), kind="sfc")


def sfc_from_weights(size: GridSize, weights) -> SfcOrder:
    size = size if isinstance(size, GridSize) else GridSize(*size)
    dual = build_dual(size)
    tree = minimum_spanning_tree(dual, weights)
    return cut_to_order(merge(size, tree))
