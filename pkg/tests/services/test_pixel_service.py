"""Tests for colour conversion, plane packing and block partitioning."""

import numpy as np
import pytest

from src.core.errors import ChannelCountError, DimensionError, EmptyGridError, LayoutError
from src.models.image import Image, PlaneLayout
from src.services.pixel_service import (
    merge_blocks,
    pack_planes,
    rgb_to_ycbcr,
    round_to_samples,
    split_blocks,
    unpack_planes,
    ycbcr_to_rgb,
)

def test_rounding_is_half_away_from_zero_and_clamped():
    assert round_to_samples(np.array([0.5, 1.5, 2.49, -3.0, 300.0])).tolist() == [1, 2, 2, 0, 255]

def test_gray_pixels_have_neutral_chroma():
    img = Image(np.full((3, 2, 2), 77, dtype=np.uint8))
    y, cb, cr = rgb_to_ycbcr(img)
    assert y.tolist() == [[77, 77], [77, 77]]
    assert cb.max() == cb.min() == 128
    assert cr.max() == cr.min() == 128

def test_worked_examples():
    img = Image(np.array([[[128, 255, 255]], [[128, 255, 0]], [[128, 255, 0]]], dtype=np.uint8))
    y, cb, cr = rgb_to_ycbcr(img)
    assert (y[0].tolist(), cb[0].tolist(), cr[0].tolist()) == ([128, 255, 76], [128, 128, 85], [128, 128, 255])
    black = ycbcr_to_rgb(np.zeros((1, 1)), np.full((1, 1), 128), np.full((1, 1), 128))
    assert black.planes.ravel().tolist() == [0, 0, 0]

def test_every_gray_level_has_neutral_chroma():
    levels = np.arange(256, dtype=np.uint8).reshape(16, 16)
    y, cb, cr = rgb_to_ycbcr(Image(np.stack([levels] * 3)))
    assert np.array_equal(y, levels)
    assert (cb == 128).all() and (cr == 128).all()

def test_lattice_round_trip_within_three():
    levels = np.arange(0, 256, 17)
    r, g, b = np.meshgrid(levels, levels, levels, indexing="ij")
    img = Image(np.stack([r, g, b]).reshape(3, 64, 64).astype(np.uint8))
    back = ycbcr_to_rgb(*rgb_to_ycbcr(img))
    assert np.abs(back.planes.astype(int) - img.planes.astype(int)).max() <= 3

def test_mismatched_planes_are_dimension_errors():
    y = np.zeros((4, 4), dtype=np.uint8)
    with pytest.raises(DimensionError):
        ycbcr_to_rgb(y, y, np.zeros((4, 5), dtype=np.uint8))
    with pytest.raises(DimensionError):
        pack_planes(y, np.zeros((3, 4), dtype=np.uint8), y, PlaneLayout("horizontal", 4, 4))
    with pytest.raises(DimensionError):
        pack_planes(y, y, y, PlaneLayout("vertical", 8, 4))

def test_colour_round_trip_error_is_small(make_image):
    img = make_image(40, 30, seed=3)
    back = ycbcr_to_rgb(*rgb_to_ycbcr(img))
    diff = np.abs(back.planes.astype(int) - img.planes.astype(int))
    assert diff.max() <= 3

def test_rgb_required():
    with pytest.raises(ChannelCountError):
        rgb_to_ycbcr(Image(np.zeros((1, 2, 2), dtype=np.uint8)))

@pytest.mark.parametrize("tag", ["horizontal", "vertical"])
def test_pack_unpack_inverse(tag):
    rng = np.random.default_rng(0)
    planes = [rng.integers(0, 256, size=(6, 8), dtype=np.uint8) for _ in range(3)]
    layout = PlaneLayout(tag, 8, 6)
    packed = pack_planes(*planes, layout)
    assert (packed.width, packed.height) == layout.packed_size
    for original, unpacked in zip(planes, unpack_planes(packed, layout)):
        assert np.array_equal(original, unpacked)

def test_unpack_rejects_wrong_size():
    with pytest.raises(LayoutError):
        unpack_planes(Image(np.zeros((1, 6, 20), dtype=np.uint8)), PlaneLayout("horizontal", 8, 6))

def test_split_keeps_margins_and_merges_back(make_image):
    img = make_image(37, 21, seed=4)
    grid = split_blocks(img, 8, 8)
    assert (grid.cols, grid.rows, grid.n) == (4, 2, 8)
    assert np.array_equal(grid.blocks[5], img.planes[:, 8:16, 8:16])
    assert merge_blocks(grid) == img

def test_block_larger_than_image():
    with pytest.raises(EmptyGridError):
        split_blocks(Image(np.zeros((1, 4, 4), dtype=np.uint8)), 8, 8)
