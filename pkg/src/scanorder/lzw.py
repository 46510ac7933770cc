"""Byte-oriented LZW with variable-width, LSB-first code packing.

Codec contract:

* the dictionary starts with the 256 single-byte strings;
* encoding is greedy longest-match;
* codes start 9 bits wide; the width grows by one when the index the next
  dictionary entry would receive no longer fits, up to 12 bits;
* the dictionary is capped at 4096 entries and then frozen (no clear codes);
* codes are packed least-significant-bit first.

Every emitted code except the last adds one entry, so the width of the
``j``-th code depends only on ``j`` and encoder and decoder agree on it
without side channels.
"""

from __future__ import annotations

from collections.abc import Iterable

__all__ = [
    "MAX_ENTRIES",
    "LZWError",
    "code_width",
    "lzw_compress",
    "lzw_decode",
    "lzw_decompress",
    "lzw_encode",
    "lzw_length",
    "pack_codes",
    "unpack_codes",
]

MAX_ENTRIES = 4096
MIN_WIDTH = 9
MAX_WIDTH = 12


class LZWError(ValueError):
    pass


def code_width(j: int) -> int:
    """Bit width of the ``j``-th emitted code (0-based)."""
    return max(MIN_WIDTH, min(MAX_WIDTH, (256 + j).bit_length()))


def lzw_encode(data: bytes | bytearray | Iterable[int]) -> list[int]:
    data = bytes(data)
    if not data:
        raise LZWError("cannot encode empty input")
    table: dict[tuple[int, int], int] = {}
    size = 256
    codes = []
    cur = data[0]
    for byte in data[1:]:
        key = (cur, byte)
        nxt = table.get(key)
        if nxt is not None:
            cur = nxt
            continue
        codes.append(cur)
        if size < MAX_ENTRIES:
            table[key] = size
            size += 1
        cur = byte
    codes.append(cur)
    return codes


def lzw_decode(codes: Iterable[int]) -> bytes:
    codes = list(codes)
    if not codes:
        raise LZWError("cannot decode an empty code sequence")
    entries: list[bytes] = [bytes([i]) for i in range(256)]
    first = codes[0]
    if not 0 <= first < 256:
        raise LZWError(f"first code {first} is not a literal")
    prev = entries[first]
    out = [prev]
    for j, code in enumerate(codes[1:], start=1):
        if code < len(entries):
            cur = entries[code]
        elif code == len(entries) and len(entries) < MAX_ENTRIES:
            cur = prev + prev[:1]
        else:
            raise LZWError(f"code {code} at position {j} is not in the dictionary")
        if len(entries) < MAX_ENTRIES:
            entries.append(prev + cur[:1])
        out.append(cur)
        prev = cur
    return b"".join(out)


def pack_codes(codes: list[int]) -> bytes:
    acc = 0
    nbits = 0
    out = bytearray()
    for j, code in enumerate(codes):
        width = code_width(j)
        if code >> width:
            raise LZWError(f"code {code} does not fit in {width} bits at position {j}")
        acc |= code << nbits
        nbits += width
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8
    if nbits:
        out.append(acc & 0xFF)
    return bytes(out)


def unpack_codes(payload: bytes, count: int) -> list[int]:
    codes = []
    acc = 0
    nbits = 0
    pos = 0
    for j in range(count):
        width = code_width(j)
        while nbits < width:
            if pos >= len(payload):
                raise LZWError(f"payload truncated at byte {pos} while reading code {j}")
            acc |= payload[pos] << nbits
            pos += 1
            nbits += 8
        codes.append(acc & ((1 << width) - 1))
        acc >>= width
        nbits -= width
    return codes


def lzw_compress(data) -> tuple[bytes, int]:
    """Encode and pack; returns the payload and the number of codes it holds."""
    codes = lzw_encode(data)
    return pack_codes(codes), len(codes)


def lzw_decompress(payload: bytes, count: int) -> bytes:
    return lzw_decode(unpack_codes(payload, count))


def _total_bits(n_codes: int) -> int:
    total = 0
    j = 0
    # widths change after 256, 768 and 1792 emitted codes
    for width, stop in ((9, 256), (10, 768), (11, 1792)):
        take = max(0, min(n_codes, stop) - j)
        total += take * width
        j += take
    return total + max(0, n_codes - j) * MAX_WIDTH


def lzw_length(data) -> int:
    """Size in bytes of the packed encoding, ``ceil(total bits / 8)``."""
    return (_total_bits(len(lzw_encode(data))) + 7) // 8
