"""The scan-order container shared by every curve constructor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSize

__all__ = ["InvalidOrderError", "SfcOrder", "adjacent_steps", "validate_order"]

# Orders of these kinds are linear scans but not space-filling curves:
# consecutive pixels need not be 4-adjacent.
NON_SFC_KINDS = frozenset({"raster"})


class InvalidOrderError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SfcOrder:
    size: GridSize
    pixels: np.ndarray
    kind: str = "sfc"

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.int64)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    def __len__(self) -> int:
        return len(self.pixels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SfcOrder):
            return NotImplemented
        return self.size == other.size and np.array_equal(self.pixels, other.pixels)

    @property
    def is_sfc(self) -> bool:
        return self.kind not in NON_SFC_KINDS

    def coords(self) -> np.ndarray:
        """(HW, 2) array of (row, col) along the order."""
        return np.stack(np.divmod(self.pixels, self.size.width), axis=1)

    def positions(self) -> np.ndarray:
        """Inverse permutation: ``positions()[pixel]`` is the step at which it is visited."""
        inv = np.empty_like(self.pixels)
        inv[self.pixels] = np.arange(len(self.pixels))
        return inv


def adjacent_steps(pixels: np.ndarray, width: int) -> np.ndarray:
    """Boolean mask, one per step, true where consecutive pixels are 4-adjacent."""
    r, c = np.divmod(np.asarray(pixels), width)
    return (np.abs(np.diff(r)) + np.abs(np.diff(c))) == 1


def validate_order(order: SfcOrder, require_adjacent: bool | None = None) -> SfcOrder:
    """Check the permutation and (unless exempt) 4-adjacency invariants."""
    n = order.size.pixels
    px = order.pixels
    if px.ndim != 1 or len(px) != n:
        raise InvalidOrderError(f"order has {px.size} entries, grid has {n} pixels")
    if px.min() < 0 or px.max() >= n or len(np.unique(px)) != n:
        raise InvalidOrderError("order is not a permutation of the grid pixels")
    if require_adjacent is None:
        require_adjacent = order.is_sfc
    if require_adjacent:
        ok = adjacent_steps(px, order.size.width)
        if not ok.all():
            t = int(np.argmin(ok))
            raise InvalidOrderError(
                f"steps {t} -> {t + 1} are not 4-adjacent: {order.size.coords(px[t])} -> {order.size.coords(px[t + 1])}"
            )
    return order
