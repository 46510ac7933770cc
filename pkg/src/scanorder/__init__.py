"""Context-based space-filling scan orders for images.

Build a scan order for one image from its pixel differences, for an image set
from averaged or learned dual-edge weights, or use a universal curve; then
score it by lag-k autocorrelation or LZW length.
"""

from .cover_merge import (
    HamiltonianCircuit,
    TreeError,
    cut_to_order,
    dafner_weights,
    merge,
    minimum_spanning_tree,
    sfc_from_weights,
    tree_weight,
)
from .curves import CURVE_KINDS, UnsupportedSizeError, hilbert_d2xy, scale_order, universal_order
from .grid import GridSize, InvalidSizeError, build_dual, build_line_graph, circuit_cover, cross_edges
from .lzw import LZWError, lzw_compress, lzw_decode, lzw_decompress, lzw_encode, lzw_length
from .objectives import (
    Objective,
    UndefinedObjectiveError,
    autocorrelation,
    flatten,
    normalize,
    normalized_objective,
    objective,
    unflatten,
)
from .order import InvalidOrderError, SfcOrder, validate_order

__version__ = "0.1.0"

__all__ = [
    "CURVE_KINDS",
    "GridSize",
    "HamiltonianCircuit",
    "InvalidOrderError",
    "InvalidSizeError",
    "LZWError",
    "Objective",
    "SfcOrder",
    "TreeError",
    "UndefinedObjectiveError",
    "UnsupportedSizeError",
    "autocorrelation",
    "build_dual",
    "build_line_graph",
    "circuit_cover",
    "cross_edges",
    "cut_to_order",
    "dafner_weights",
    "flatten",
    "hilbert_d2xy",
    "lzw_compress",
    "lzw_decode",
    "lzw_decompress",
    "lzw_encode",
    "lzw_length",
    "merge",
    "minimum_spanning_tree",
    "normalize",
    "normalized_objective",
    "objective",
    "scale_order",
    "sfc_from_weights",
    "tree_weight",
    "unflatten",
    "universal_order",
    "validate_order",
]
