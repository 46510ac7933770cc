import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scanorder.cover_merge import sfc_from_weights
from scanorder.curves import universal_order
from scanorder.grid import GridSize, build_dual
from scanorder.objectives import (
    EPS,
    LZW,
    Objective,
    UndefinedObjectiveError,
    autocorrelation,
    flatten,
    normalize,
    normalized_objective,
    objective,
    quantize,
    sequence_lzw_length,
    to_grayscale,
    unflatten,
)


def test_flatten_constant_and_serpentine():
    o = universal_order("serpentine", 2)
    assert np.all(flatten(np.full((2, 2), 0.4), o) == 0.4)
    np.testing.assert_array_equal(flatten(np.array([[0, 1], [2, 3]]) / 3, o), np.array([0, 1, 3, 2]) / 3)


def test_flatten_batch_and_shape_mismatch():
    o = universal_order("hilbert", 4)
    imgs = np.random.default_rng(0).random((3, 4, 4))
    np.testing.assert_array_equal(flatten(imgs, o)[1], flatten(imgs[1], o))
    with pytest.raises(ValueError):
        flatten(np.zeros((4, 6)), o)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31))
def test_unflatten_inverts_flatten(seed):
    rng = np.random.default_rng(seed)
    size = GridSize(8, 6)
    order = sfc_from_weights(size, rng.normal(size=build_dual(size).n_edges))
    img = rng.random((8, 6))
    np.testing.assert_array_equal(unflatten(flatten(img, order), order), img)


def test_constant_closed_form():
    assert autocorrelation(np.full(1024, 0.37), 6) == pytest.approx(1 - 6 / 1024, abs=1e-12)
    assert abs(autocorrelation(np.full(1024, 0.37), 6) - 0.994140625) < 1e-12


@pytest.mark.parametrize("length", [10, 64, 1024])
def test_alternating_closed_form(length):
    y = np.tile([1.0, 0.0], length // 2)
    assert abs(autocorrelation(y, 1) - 0.0) < 1e-12
    assert abs(autocorrelation(y, 2) - (1 - 2 / length)) < 1e-12


def test_all_zero_and_bad_lag():
    with pytest.raises(UndefinedObjectiveError):
        autocorrelation(np.zeros(16), 1)
    with pytest.raises(ValueError):
        autocorrelation(np.ones(16), 16)


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, st.integers(8, 200), elements=st.floats(0.01, 1)),
    st.integers(1, 7),
    st.floats(0.01, 100),
)
def test_autocorrelation_scale_invariant_and_bounded(y, k, alpha):
    r = autocorrelation(y, k)
    assert 0 <= r <= 1
    assert autocorrelation(alpha * y, k) == pytest.approx(r, rel=1e-10)


def test_autocorrelation_vectorises():
    y = np.random.default_rng(1).random((3, 5, 50))
    r = autocorrelation(y, 4)
    assert r.shape == (3, 5)
    assert r[2, 1] == pytest.approx(autocorrelation(y[2, 1], 4))


def test_quantize():
    assert quantize([0.0, 1.0, 0.5, 1.2, -0.1]) == bytes([0, 255, 128, 255, 0])


def test_objective_values():
    img = np.random.default_rng(2).random((8, 8))
    o = universal_order("hilbert", 8)
    assert objective(img, o) == pytest.approx(-autocorrelation(flatten(img, o), 6))
    multi = Objective(lags=(4, 6))
    assert objective(img, o, multi) == pytest.approx(
        -(autocorrelation(flatten(img, o), 4) + autocorrelation(flatten(img, o), 6)) / 2
    )
    lz = Objective(LZW)
    assert objective(img, o, lz) == sequence_lzw_length(flatten(img, o))


def test_normalized_constant_image():
    o = universal_order("hilbert", 32)
    v = normalized_objective(np.full((32, 32), 0.5), o)
    assert v == pytest.approx((1 - 0.994140625) / 2)
    assert v == pytest.approx(0.00293, abs=1e-5)


def test_normalization_monotone_and_clipped():
    size = GridSize(32, 32)
    ac, lz = Objective(), Objective(LZW)
    vals = np.linspace(-1, 1, 50)
    assert np.all(np.diff(normalize(vals, ac, size)) > 0)
    lens = np.linspace(1, 2000, 50)
    assert np.all(np.diff(normalize(lens, lz, size)) > 0)
    assert normalize(0, lz, size) == EPS
    assert normalize(10**6, lz, size) == 1 - EPS


def test_lzw_length_depends_on_order():
    img = np.random.default_rng(3).integers(0, 4, (16, 16)) / 3
    size = GridSize(16, 16)
    n = build_dual(size).n_edges
    base = sequence_lzw_length(flatten(img, universal_order("raster", size)))
    rng = np.random.default_rng(4)
    lengths = {sequence_lzw_length(flatten(img, sfc_from_weights(size, rng.normal(size=n)))) for _ in range(100)}
    assert lengths - {base}


def test_objective_parse_and_validation():
    assert Objective.parse("lzw").name == LZW
    assert Objective.parse("ac", 10).lags == (10,)
    with pytest.raises(ValueError):
        Objective("entropy")
    with pytest.raises(ValueError):
        Objective(lags=(0,))


def test_grayscale():
    rgb = np.zeros((2, 2, 3))
    rgb[..., 1] = 1.0
    np.testing.assert_allclose(to_grayscale(rgb), 0.587)
    gray = np.ones((2, 2))
    assert to_grayscale(gray) is not None and np.all(to_grayscale(gray) == 1)
