"""Pixel plumbing: colour transforms, plane packing and block partitioning."""
from typing import Tuple

import numpy as np

from src.core.errors import ChannelCountError, DimensionError, EmptyGridError, LayoutError
from src.models.image import MAX_SAMPLE, BlockGrid, Image, PlaneLayout

Plane = np.ndarray

# ITU-R BT.601 full-range coefficients as used by JFIF.
_RGB_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.1687, -0.3313, 0.5],
        [0.5, -0.4187, -0.0813],
    ]
)
_CHROMA_OFFSET = 128.0


def round_to_samples(values: np.ndarray) -> np.ndarray:
    """Round half away from zero and clamp to the 8-bit range."""
    rounded = np.sign(values) * np.floor(np.abs(values) + 0.5)
    return np.clip(rounded, 0, MAX_SAMPLE).astype(np.uint8)


def rgb_to_ycbcr(img: Image) -> Tuple[Plane, Plane, Plane]:
    if img.channels != 3:
        raise ChannelCountError(f"RGB to YCbCr needs a 3-channel image, got {img.channels}")
    rgb = img.planes.astype(np.float64)
    ycc = np.tensordot(_RGB_TO_YCBCR, rgb, axes=([1], [0]))
    ycc[1:] += _CHROMA_OFFSET
    out = round_to_samples(ycc)
    return out[0], out[1], out[2]


def ycbcr_to_rgb(y: Plane, cb: Plane, cr: Plane) -> Image:
    if not (np.shape(y) == np.shape(cb) == np.shape(cr)):
        raise DimensionError(
            f"Y/Cb/Cr planes must share dimensions, got {np.shape(y)}, {np.shape(cb)}, {np.shape(cr)}"
        )
    yf = np.asarray(y, dtype=np.float64)
    cbf = np.asarray(cb, dtype=np.float64) - _CHROMA_OFFSET
    crf = np.asarray(cr, dtype=np.float64) - _CHROMA_OFFSET
    r = yf + 1.402 * crf
    g = yf - 0.3441 * cbf - 0.7141 * crf
    b = yf + 1.772 * cbf
    return Image(round_to_samples(np.stack([r, g, b])))


def pack_planes(y: Plane, cb: Plane, cr: Plane, layout: PlaneLayout) -> Image:
    """Lay the three planes out in one single-channel image (Y|Cb|Cr)."""
    if not (np.shape(y) == np.shape(cb) == np.shape(cr)):
        raise DimensionError("Planes to pack must share dimensions")
    if np.shape(y) != (layout.original_h, layout.original_w):
        raise DimensionError(
            f"Planes are {np.shape(y)[1]}x{np.shape(y)[0]} but the layout expects "
            f"{layout.original_w}x{layout.original_h}"
        )
    axis = 1 if layout.tag == "horizontal" else 0
    return Image(np.concatenate([y, cb, cr], axis=axis)[np.newaxis])


def unpack_planes(img: Image, layout: PlaneLayout) -> Tuple[Plane, Plane, Plane]:
    if img.channels != 1:
        raise LayoutError(f"A packed image has one channel, got {img.channels}")
    if (img.width, img.height) != layout.packed_size:
        pw, ph = layout.packed_size
        raise LayoutError(
            f"Packed image is {img.width}x{img.height}, expected {pw}x{ph} for a "
            f"{layout.tag} layout of {layout.original_w}x{layout.original_h}"
        )
    plane = img.planes[0]
    parts = np.split(plane, 3, axis=1 if layout.tag == "horizontal" else 0)
    return parts[0].copy(), parts[1].copy(), parts[2].copy()


def split_blocks(img: Image, bx: int, by: int) -> BlockGrid:
    """Cut ``img`` into row-major tiles; partial blocks on the right/bottom stay in the canvas."""
    if bx < 1 or by < 1:
        raise EmptyGridError(f"Block size must be positive, got {bx}x{by}")
    if bx > img.width or by > img.height:
        raise EmptyGridError(f"Block {bx}x{by} does not fit in a {img.width}x{img.height} image")
    cols, rows = img.width // bx, img.height // by
    core = img.planes[:, : rows * by, : cols * bx]
    blocks = (
        core.reshape(img.channels, rows, by, cols, bx)
        .transpose(1, 3, 0, 2, 4)
        .reshape(rows * cols, img.channels, by, bx)
    )
    return BlockGrid(bx, by, cols, rows, np.ascontiguousarray(blocks), img.planes)


def merge_blocks(grid: BlockGrid) -> Image:
    channels = grid.channels
    canvas = np.array(grid.canvas, dtype=np.uint8, copy=True)
    core = (
        np.asarray(grid.blocks)
        .reshape(grid.rows, grid.cols, channels, grid.block_h, grid.block_w)
        .transpose(2, 0, 3, 1, 4)
        .reshape(channels, grid.rows * grid.block_h, grid.cols * grid.block_w)
    )
    canvas[:, : core.shape[1], : core.shape[2]] = core
    return Image(canvas)
