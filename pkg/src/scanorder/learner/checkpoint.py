"""Binary checkpoints of generator/evaluator parameters.

Byte layout, all integers little-endian::

    8 bytes   magic  b"SFCCKPT\\0"
    uint32    format version (1)
    uint32    length n of the JSON header
    n bytes   UTF-8 JSON: {"net": NetConfig fields, "extra": {...}}
    uint32    tensor count
    per tensor:
      uint16  name length m, then m bytes UTF-8 name ("generator.enc.stem.w", ...)
      uint8   ndim, then ndim x uint32 dims
      prod(dims) x float64 (little-endian) values, row-major
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .networks import Evaluator, Generator, NetConfig

__all__ = ["CheckpointError", "load_checkpoint", "read_tensors", "save_checkpoint"]

MAGIC = b"SFCCKPT\0"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, generator: Generator, evaluator: Evaluator | None = None, extra: dict | None = None) -> None:
    tensors = [(f"generator.{k}", v) for k, v in generator.params.items()]
    if evaluator is not None:
        tensors += [(f"evaluator.{k}", v) for k, v in evaluator.params.items()]
    header = json.dumps({"net": generator.cfg.to_dict(), "extra": extra or {}}, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<II", VERSION, len(header)) + header)
        fh.write(struct.pack("<I", len(tensors)))
        for name, value in tensors:
            raw = name.encode()
            arr = np.ascontiguousarray(value, dtype="<f8")
            fh.write(struct.pack("<H", len(raw)) + raw)
            fh.write(struct.pack(f"<B{arr.ndim}I", arr.ndim, *arr.shape))
            fh.write(arr.tobytes())


def read_tensors(path) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    pos = 8

    def take(fmt: str):
        nonlocal pos
        size = struct.calcsize(fmt)
        if pos + size > len(raw):
            raise CheckpointError(f"{path}: truncated at byte offset {pos}")
        out = struct.unpack_from(fmt, raw, pos)
        pos += size
        return out

    version, hlen = take("<II")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    header = json.loads(take(f"<{hlen}s")[0])
    (count,) = take("<I")
    tensors = {}
    for _ in range(count):
        (nlen,) = take("<H")
        name = take(f"<{nlen}s")[0].decode()
        (ndim,) = take("<B")
        dims = take(f"<{ndim}I")
        n = int(np.prod(dims))
        tensors[name] = np.array(take(f"<{n}d"), dtype=np.float64).reshape(dims)
    return header, tensors


def load_checkpoint(path, dtype: str | None = None) -> tuple[Generator, Evaluator | None, dict]:
    header, tensors = read_tensors(path)
    cfg = NetConfig(**header["net"])
    if dtype is not None:
        cfg = NetConfig(**{**cfg.to_dict(), "dtype": dtype})
    gen = Generator(cfg)
    gen.load_params({k[len("generator.") :]: v for k, v in tensors.items() if k.startswith("generator.")})
    ev_params = {k[len("evaluator.") :]: v for k, v in tensors.items() if k.startswith("evaluator.")}
    ev = None
    if ev_params:
        ev = Evaluator(cfg)
        ev.load_params(ev_params)
    return gen, ev, header.get("extra", {})
