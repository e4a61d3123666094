"""Raster types: planar 8-bit images, block grids and plane layouts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence, Tuple

import numpy as np

from src.core.errors import ChannelCountError, DimensionError, LayoutError, SampleRangeError

BIT_DEPTH = 8
MAX_SAMPLE = (1 << BIT_DEPTH) - 1


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.uint8, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Image:
    """Planar raster of one or three 8-bit channels.

    ``planes`` has shape ``(channels, height, width)``; the array is copied on
    construction and marked read-only so an Image can be shared freely.
    """

    planes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.planes)
        if arr.ndim != 3:
            raise DimensionError(f"Image planes must be 3-D (channels, height, width), got shape {arr.shape}")
        if arr.shape[0] not in (1, 3):
            raise ChannelCountError(f"Image must have 1 or 3 channels, got {arr.shape[0]}")
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise DimensionError(f"Image must be at least 1x1, got {arr.shape[2]}x{arr.shape[1]}")
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.floating) and not np.all(np.isfinite(arr)):
                raise SampleRangeError("Image samples must be finite")
            if arr.size and (arr.min() < 0 or arr.max() > MAX_SAMPLE):
                raise SampleRangeError(f"Image samples must lie in [0, {MAX_SAMPLE}]")
            if np.issubdtype(arr.dtype, np.floating) and not np.array_equal(arr, np.round(arr)):
                raise SampleRangeError("Image samples must be integers")
        object.__setattr__(self, "planes", _frozen(arr))

    @property
    def channels(self) -> int:
        return int(self.planes.shape[0])

    @property
    def height(self) -> int:
        return int(self.planes.shape[1])

    @property
    def width(self) -> int:
        return int(self.planes.shape[2])

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.channels, self.height, self.width)

    @property
    def samples(self) -> bytes:
        """Row-major samples, one plane after the other."""
        return self.planes.tobytes()

    def plane(self, index: int) -> np.ndarray:
        return self.planes[index]

    @classmethod
    def from_samples(cls, width: int, height: int, channels: int, samples: Sequence[int] | bytes) -> "Image":
        arr = np.asarray(bytearray(samples) if isinstance(samples, (bytes, bytearray)) else samples)
        expected = width * height * channels
        if arr.size != expected:
            raise DimensionError(
                f"Expected {expected} samples for {width}x{height}x{channels}, got {arr.size}"
            )
        return cls(arr.reshape(channels, height, width))

    @classmethod
    def from_planes(cls, *planes: np.ndarray) -> "Image":
        shapes = {np.shape(p) for p in planes}
        if len(shapes) != 1:
            raise DimensionError(f"All planes must share dimensions, got {sorted(shapes)}")
        return cls(np.stack(planes, axis=0))

    @classmethod
    def from_interleaved(cls, array: np.ndarray) -> "Image":
        """Build from an ``(H, W)`` or ``(H, W, C)`` array as Pillow hands them out."""
        arr = np.asarray(array)
        if arr.ndim == 2:
            return cls(arr[np.newaxis, :, :])
        if arr.ndim == 3:
            return cls(np.transpose(arr, (2, 0, 1)))
        raise DimensionError(f"Interleaved array must be 2-D or 3-D, got shape {arr.shape}")

    def to_interleaved(self) -> np.ndarray:
        if self.channels == 1:
            return np.array(self.planes[0])
        return np.ascontiguousarray(np.transpose(self.planes, (1, 2, 0)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.planes, other.planes))

    def __hash__(self) -> int:
        return hash((self.shape, self.planes.tobytes()))


@dataclass(frozen=True)
class BlockGrid:
    """An image cut into ``cols x rows`` tiles of ``block_w x block_h`` pixels.

    ``blocks`` has shape ``(n, channels, block_h, block_w)`` in row-major block
    order. ``canvas`` keeps the full source planes so that right/bottom margins
    that do not fill a whole block survive a split/merge untouched.
    """

    block_w: int
    block_h: int
    cols: int
    rows: int
    blocks: np.ndarray
    canvas: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = self.cols * self.rows
        expected = (n, self.canvas.shape[0], self.block_h, self.block_w)
        if tuple(self.blocks.shape) != expected:
            raise DimensionError(f"Block array shape {self.blocks.shape} does not match grid {expected}")
        if self.cols * self.block_w > self.canvas.shape[2] or self.rows * self.block_h > self.canvas.shape[1]:
            raise DimensionError("Grid extends beyond its canvas")

    @property
    def n(self) -> int:
        return self.cols * self.rows

    @property
    def channels(self) -> int:
        return int(self.canvas.shape[0])

    def with_blocks(self, blocks: np.ndarray) -> "BlockGrid":
        """Same geometry and margins, new tile contents."""
        return BlockGrid(self.block_w, self.block_h, self.cols, self.rows, np.asarray(blocks, dtype=np.uint8), self.canvas)


LayoutTag = Literal["horizontal", "vertical"]


@dataclass(frozen=True)
class PlaneLayout:
    """How the Y, Cb and Cr planes are placed side by side in one grayscale image."""

    tag: LayoutTag
    original_w: int
    original_h: int

    def __post_init__(self) -> None:
        if self.tag not in ("horizontal", "vertical"):
            raise LayoutError(f"Unknown plane layout '{self.tag}' (expected horizontal or vertical)")
        if self.original_w < 1 or self.original_h < 1:
            raise LayoutError(f"Layout dimensions must be positive, got {self.original_w}x{self.original_h}")

    @property
    def packed_size(self) -> Tuple[int, int]:
        """(width, height) of the packed single-channel image."""
        if self.tag == "horizontal":
            return (3 * self.original_w, self.original_h)
        return (self.original_w, 3 * self.original_h)

    @classmethod
    def from_packed(cls, tag: LayoutTag, packed_w: int, packed_h: int) -> "PlaneLayout":
        """Infer the original dimensions from a packed image."""
        if tag == "horizontal":
            if packed_w % 3:
                raise LayoutError(f"Packed width {packed_w} is not a multiple of 3 for a horizontal layout")
            return cls(tag, packed_w // 3, packed_h)
        if packed_h % 3:
            raise LayoutError(f"Packed height {packed_h} is not a multiple of 3 for a vertical layout")
        return cls(tag, packed_w, packed_h // 3)
