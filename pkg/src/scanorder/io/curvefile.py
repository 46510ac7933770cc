"""Plain-text curve files.

Format::

    scanorder-curve 1
    height 32
    width 32
    kind hilbert
    meta objective neg_autocorrelation     (zero or more provenance lines)
    order
    0 1 33 32 ...                            (row-major pixel ids, any line breaks)

Blank lines and lines starting with ``#`` are ignored before ``order``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ..grid import GridSize
from ..order import InvalidOrderError, SfcOrder, validate_order

__all__ = ["CurveFile", "CurveFileError", "read_curve", "write_curve"]

MAGIC = "scanorder-curve"
VERSION = 1


class CurveFileError(ValueError):
    pass


@dataclass
class CurveFile:
    order: SfcOrder
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.order.kind


def write_curve(path, curve: CurveFile | SfcOrder, meta: dict | None = None) -> None:
    if isinstance(curve, SfcOrder):
        curve = CurveFile(curve, dict(meta or {}))
    o = curve.order
    lines = [f"{MAGIC} {VERSION}", f"height {o.size.height}", f"width {o.size.width}", f"kind {o.kind}"]
    for key, value in curve.meta.items():
        if not key or any(c.isspace() for c in key):
            raise CurveFileError(f"metadata key {key!r} must be a single token")
        lines.append(f"meta {key} {str(value).replace(chr(10), ' ')}")
    lines.append("order")
    px = o.pixels.tolist()
    step = max(o.size.width, 1)
    lines.extend(" ".join(map(str, px[i : i + step])) for i in range(0, len(px), step))
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_curve(path, validate: bool = True) -> CurveFile:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split()[:1] != [MAGIC]:
        raise CurveFileError(f"{path}: missing '{MAGIC}' header")
    try:
        version = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise CurveFileError(f"{path}: malformed version line") from exc
    if version != VERSION:
        raise CurveFileError(f"{path}: unsupported version {version}")
    fields: dict[str, str] = {}
    meta: dict[str, str] = {}
    body = None
    for n, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text == "order":
            body = lines[n:]
            break
        key, _, rest = text.partition(" ")
        if key == "meta":
            mkey, _, mval = rest.strip().partition(" ")
            meta[mkey] = mval.strip()
        elif key in ("height", "width", "kind"):
            fields[key] = rest.strip()
        else:
            raise CurveFileError(f"{path}:{n}: unknown field {key!r}")
    if body is None:
        raise CurveFileError(f"{path}: missing 'order' section")
    missing = {"height", "width", "kind"} - set(fields)
    if missing:
        raise CurveFileError(f"{path}: missing fields {sorted(missing)}")
    try:
        size = GridSize(int(fields["height"]), int(fields["width"]))
        px = np.array(" ".join(body).split(), dtype=np.int64)
    except ValueError as exc:
        raise CurveFileError(f"{path}: {exc}") from exc
    order = SfcOrder(size, px, kind=fields["kind"])
    if validate:
        try:
            validate_order(order)
        except InvalidOrderError as exc:
            raise CurveFileError(f"{path}: {exc}") from exc
    return CurveFile(order, meta)
