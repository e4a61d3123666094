"""Block-scrambling ciphers.

Three schemes share one scrambling core:

- ``conventional``: RGB blocks are permuted, posed, negative-positive
  transformed and colour-shuffled (16x16 blocks by default).
- ``grayscale``: the image is converted to YCbCr, the three planes are packed
  into one grayscale image, and that image is scrambled without a colour
  shuffle (8x8 blocks by default).
- ``luminance``: only the Y plane is scrambled; used to measure how much a
  single channel helps an attacker.

Draws for poses, polarity and channel order are indexed by scrambled position,
so decryption undoes the steps in reverse order with the same draws.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from src.models.configs import CipherConfig
from src.core.errors import ChannelCountError, ConfigError, LayoutError, ShapeError
from src.core.security import (
    derive_step_keys,
    gen_channel_perms,
    gen_permutation,
    gen_polarity,
    gen_poses,
)
from src.models.image import BIT_DEPTH, Image, PlaneLayout
from src.models.keys import SecretKey, StepKeys
from src.models.transform import ALL_POSES, CHANNEL_PERMS, D4Pose, TransformRecord, invert_channel_perm
from src.services.pixel_service import (
    merge_blocks,
    pack_planes,
    rgb_to_ycbcr,
    split_blocks,
    unpack_planes,
    ycbcr_to_rgb,
)

logger = logging.getLogger(__name__)


# ---------------- Block transforms -----------------
def apply_negpos(block: np.ndarray, bit: int, bit_depth: int = BIT_DEPTH) -> np.ndarray:
    if not bit:
        return block
    return np.bitwise_xor(block, (1 << bit_depth) - 1).astype(block.dtype)


def apply_pose(block: np.ndarray, pose: D4Pose) -> np.ndarray:
    if pose.rotation % 2 and block.shape[-1] != block.shape[-2]:
        raise ShapeError(
            f"Cannot rotate a {block.shape[-1]}x{block.shape[-2]} block by {90 * pose.rotation} degrees"
        )
    return pose.apply(block)


def apply_channel_perm(block: np.ndarray, index: int) -> np.ndarray:
    """Reorder the channel axis (third from last) so that ``out[c] = block[perm[c]]``."""
    return block[..., list(CHANNEL_PERMS[index]), :, :]


# ---------------- Scrambling core -----------------
def draw_transforms(keys: StepKeys, cols: int, rows: int, with_channels: bool) -> TransformRecord:
    n = cols * rows
    return TransformRecord(
        permutation=gen_permutation(keys.k1, n),
        poses=gen_poses(keys.k2, n),
        polarity=gen_polarity(keys.k3, n),
        cols=cols,
        rows=rows,
        channel_perm=gen_channel_perms(keys.k4, n) if with_channels else None,
    )


def scramble_blocks(blocks: np.ndarray, record: TransformRecord) -> np.ndarray:
    """Steps 1-4 over an ``(n, C, B, B)`` block array."""
    out = np.array(blocks[record.permutation])
    for pose in ALL_POSES[1:]:
        mask = record.poses == pose.index
        if mask.any():
            out[mask] = pose.apply(out[mask])
    out[record.polarity == 1] ^= np.uint8((1 << BIT_DEPTH) - 1)
    if record.channel_perm is not None:
        for index in range(1, len(CHANNEL_PERMS)):
            mask = record.channel_perm == index
            if mask.any():
                out[mask] = apply_channel_perm(out[mask], index)
    return out


def unscramble_blocks(blocks: np.ndarray, record: TransformRecord) -> np.ndarray:
    out = np.array(blocks)
    if record.channel_perm is not None:
        for index in range(1, len(CHANNEL_PERMS)):
            mask = record.channel_perm == index
            if mask.any():
                out[mask] = apply_channel_perm(out[mask], invert_channel_perm(index))
    out[record.polarity == 1] ^= np.uint8((1 << BIT_DEPTH) - 1)
    for pose in ALL_POSES[1:]:
        mask = record.poses == pose.index
        if mask.any():
            out[mask] = pose.inverse().apply(out[mask])
    return out[record.inverse_permutation()]


def _check_block(cfg: CipherConfig) -> Tuple[int, int]:
    bx, by = cfg.block_size
    if bx != by:
        raise ShapeError(f"Blocks must be square so every pose applies, got {bx}x{by}")
    if not cfg.recommended_block:
        logger.warning(
            "Block size %dx%d is not the %s default; JPEG compression performance degrades",
            bx, by, cfg.scheme,
        )
    return bx, by


def scramble_image(img: Image, record: TransformRecord, block: int) -> Image:
    """Apply a known transform record to an image (no key involved)."""
    grid = split_blocks(img, block, block)
    if (grid.cols, grid.rows) != (record.cols, record.rows):
        raise LayoutError(
            f"Record grid {record.cols}x{record.rows} does not match image grid {grid.cols}x{grid.rows}"
        )
    return merge_blocks(grid.with_blocks(scramble_blocks(grid.blocks, record)))


def _encrypt_plane_image(img: Image, keys: StepKeys, block: int, with_channels: bool) -> Tuple[Image, TransformRecord]:
    grid = split_blocks(img, block, block)
    record = draw_transforms(keys, grid.cols, grid.rows, with_channels)
    logger.debug("Scrambling %d blocks of %dx%d (%d channel(s))", grid.n, block, block, img.channels)
    return merge_blocks(grid.with_blocks(scramble_blocks(grid.blocks, record))), record


def _decrypt_plane_image(enc: Image, keys: StepKeys, block: int, with_channels: bool) -> Image:
    grid = split_blocks(enc, block, block)
    record = draw_transforms(keys, grid.cols, grid.rows, with_channels)
    return merge_blocks(grid.with_blocks(unscramble_blocks(grid.blocks, record)))


def _require_rgb(img: Image, what: str) -> None:
    if img.channels != 3:
        raise ChannelCountError(f"{what} needs a 3-channel image, got {img.channels}")


# ---------------- Conventional scheme -----------------
def encrypt_conventional(img: Image, keys: StepKeys, cfg: CipherConfig) -> Tuple[Image, TransformRecord]:
    _require_rgb(img, "Conventional encryption")
    block, _ = _check_block(cfg)
    return _encrypt_plane_image(img, keys, block, with_channels=True)


def decrypt_conventional(
    enc: Image, keys: StepKeys, cfg: CipherConfig, original_size: Optional[Tuple[int, int]] = None
) -> Image:
    _require_rgb(enc, "Conventional decryption")
    if original_size is not None and tuple(original_size) != (enc.width, enc.height):
        raise LayoutError(
            f"Encrypted image is {enc.width}x{enc.height} but the key file expects "
            f"{original_size[0]}x{original_size[1]}"
        )
    block, _ = _check_block(cfg)
    return _decrypt_plane_image(enc, keys, block, with_channels=True)


# ---------------- Grayscale-based scheme -----------------
def encrypt_grayscale(img: Image, keys: StepKeys, cfg: CipherConfig) -> Tuple[Image, TransformRecord]:
    _require_rgb(img, "Grayscale-based encryption")
    block, _ = _check_block(cfg)
    layout = PlaneLayout(cfg.layout, img.width, img.height)
    packed = pack_planes(*rgb_to_ycbcr(img), layout)
    return _encrypt_plane_image(packed, keys, block, with_channels=False)


def _resolve_layout(enc: Image, cfg: CipherConfig, original_size: Optional[Tuple[int, int]]) -> PlaneLayout:
    if enc.channels != 1:
        raise LayoutError(f"A grayscale-based encrypted image has one channel, got {enc.channels}")
    if original_size is None:
        return PlaneLayout.from_packed(cfg.layout, enc.width, enc.height)
    layout = PlaneLayout(cfg.layout, original_size[0], original_size[1])
    if (enc.width, enc.height) != layout.packed_size:
        pw, ph = layout.packed_size
        raise LayoutError(
            f"Encrypted image is {enc.width}x{enc.height}, expected {pw}x{ph} for a "
            f"{cfg.layout} layout of {original_size[0]}x{original_size[1]}"
        )
    return layout


def decrypt_grayscale(
    enc: Image, keys: StepKeys, cfg: CipherConfig, original_size: Optional[Tuple[int, int]] = None
) -> Image:
    layout = _resolve_layout(enc, cfg, original_size)
    block, _ = _check_block(cfg)
    packed = _decrypt_plane_image(enc, keys, block, with_channels=False)
    return ycbcr_to_rgb(*unpack_planes(packed, layout))


# ---------------- Luminance-only ablation -----------------
def luminance_plane(img: Image) -> Image:
    if img.channels == 1:
        return img
    y, _, _ = rgb_to_ycbcr(img)
    return Image(y[np.newaxis])


def encrypt_luminance(img: Image, keys: StepKeys, cfg: CipherConfig) -> Tuple[Image, TransformRecord]:
    block, _ = _check_block(cfg)
    return _encrypt_plane_image(luminance_plane(img), keys, block, with_channels=False)


def decrypt_luminance(
    enc: Image, keys: StepKeys, cfg: CipherConfig, original_size: Optional[Tuple[int, int]] = None
) -> Image:
    if enc.channels != 1:
        raise LayoutError(f"A luminance encrypted image has one channel, got {enc.channels}")
    if original_size is not None and tuple(original_size) != (enc.width, enc.height):
        raise LayoutError(
            f"Encrypted image is {enc.width}x{enc.height} but the key file expects "
            f"{original_size[0]}x{original_size[1]}"
        )
    block, _ = _check_block(cfg)
    return _decrypt_plane_image(enc, keys, block, with_channels=False)


# ---------------- Dispatch -----------------
_ENCRYPT = {
    "conventional": encrypt_conventional,
    "grayscale": encrypt_grayscale,
    "luminance": encrypt_luminance,
}
_DECRYPT = {
    "conventional": decrypt_conventional,
    "grayscale": decrypt_grayscale,
    "luminance": decrypt_luminance,
}


def encrypt_image(img: Image, sk: SecretKey, cfg: CipherConfig) -> Tuple[Image, TransformRecord]:
    if cfg.scheme not in _ENCRYPT:
        raise ConfigError(f"Unknown scheme '{cfg.scheme}'")
    enc, record = _ENCRYPT[cfg.scheme](img, derive_step_keys(sk), cfg)
    logger.info("Encrypted %dx%d image with the %s scheme into %d blocks", img.width, img.height, cfg.scheme, record.n)
    return enc, record


def decrypt_image(
    enc: Image, sk: SecretKey, cfg: CipherConfig, original_size: Optional[Tuple[int, int]] = None
) -> Image:
    if cfg.scheme not in _DECRYPT:
        raise ConfigError(f"Unknown scheme '{cfg.scheme}'")
    return _DECRYPT[cfg.scheme](enc, derive_step_keys(sk), cfg, original_size)


def block_pieces(enc: Image, cfg: CipherConfig) -> Tuple[np.ndarray, int, int]:
    """The jigsaw pieces of an encrypted image: ``(blocks, cols, rows)``."""
    block, _ = _check_block(cfg)
    grid = split_blocks(enc, block, block)
    return np.array(grid.blocks), grid.cols, grid.rows
