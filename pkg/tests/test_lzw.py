import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_lzw_codes, lzw_bit_length

from scanorder.lzw import (
    LZWError,
    code_width,
    lzw_compress,
    lzw_decode,
    lzw_decompress,
    lzw_encode,
    lzw_length,
    pack_codes,
    unpack_codes,
)

CLASSIC = b"TOBEORNOTTOBEORTOBEORNOT"


def test_aaaa():
    assert lzw_encode(b"aaaa") == [97, 256, 97]


def test_classic_string():
    codes = lzw_encode(CLASSIC)
    assert len(CLASSIC) == 24
    assert len(codes) == 16
    assert codes == brute_lzw_codes(CLASSIC)


def test_empty_input_rejected():
    with pytest.raises(LZWError):
        lzw_encode(b"")


@settings(max_examples=300, deadline=None)
@given(st.binary(min_size=1, max_size=3000))
def test_encoder_matches_textbook_and_round_trips(data):
    codes = lzw_encode(data)
    assert codes == brute_lzw_codes(data)
    assert lzw_decode(codes) == data
    payload, count = lzw_compress(data)
    assert count == len(codes)
    assert lzw_decompress(payload, count) == data
    assert len(payload) == lzw_length(data) == math.ceil(lzw_bit_length(count) / 8)


def test_round_trip_beyond_dictionary_cap():
    rng = np.random.default_rng(0)
    data = rng.integers(0, 8, 60000, dtype=np.uint8).tobytes()
    codes = lzw_encode(data)
    assert max(codes) < 4096
    assert len(codes) > 4096 - 256
    assert lzw_decompress(*lzw_compress(data)) == data


def test_code_widths():
    assert [code_width(j) for j in (0, 255, 256, 767, 768, 1791, 1792, 10**6)] == [9, 9, 10, 10, 11, 11, 12, 12]


def test_packing_is_lsb_first():
    # code 0x1FF in 9 bits then 0x000: low byte 0xFF, then bit 8 of code 0 in bit 0 of the next byte
    assert pack_codes([0x1FF, 0]) == bytes([0xFF, 0x01, 0x00])
    assert unpack_codes(pack_codes([5, 300, 7]), 3) == [5, 300, 7]


def test_truncated_payload_names_offset():
    payload = pack_codes([1, 2, 3, 4])
    with pytest.raises(LZWError, match="truncated at byte 2"):
        unpack_codes(payload[:2], 4)


def test_run_length_triangular_law():
    for n in list(range(1, 200)) + [997, 4096, 5050, 5051, 10_000]:
        m = len(lzw_encode(b"\x07" * n))
        expect = next(k for k in range(1, n + 2) if k * (k + 1) // 2 >= n)
        assert m == expect, n


def test_random_strings_round_trip_1000():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        data = rng.integers(0, rng.integers(1, 257), rng.integers(1, 400), dtype=np.uint8).tobytes()
        assert lzw_decode(lzw_encode(data)) == data
