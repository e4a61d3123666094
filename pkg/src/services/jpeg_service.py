"""JPEG encode/decode with explicit subsampling and quantization-table control.

Pillow (libjpeg underneath) does the coding. Colour images use libjpeg's own
quality scaling; grayscale images are written with one pre-scaled IJG table so
that either the luminance or the chrominance table can be selected.
"""
import io
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image as PILImage
from PIL import JpegImagePlugin, UnidentifiedImageError
from pydantic import ValidationError

from src.models.configs import JpegParams
from src.core.errors import ConfigError, DecodeError
from src.models.image import Image
from src.services.static_references.ijg_tables import BASE_TABLES, scaled_table

logger = logging.getLogger(__name__)

# Pillow's ``subsampling`` save option.
_PIL_SUBSAMPLING = {"444": 0, "420": 2}
_SAMPLING_NAMES = {0: "444", 2: "420"}


def _check_params(img: Image, params: JpegParams) -> None:
    if img.channels == 3:
        if params.subsampling == "gray":
            raise ConfigError("A 3-channel image cannot be encoded as grayscale; use 444 or 420")
        if params.table_choice is not None:
            raise ConfigError("table_choice only applies to grayscale images")
    elif params.subsampling != "gray":
        raise ConfigError(f"A 1-channel image has no chroma to subsample ({params.subsampling} requested)")


def jpeg_encode(img: Image, params: JpegParams) -> bytes:
    """Baseline JFIF bytes for ``img``."""
    _check_params(img, params)
    pil = PILImage.fromarray(img.to_interleaved())
    buffer = io.BytesIO()
    if img.channels == 3:
        pil.save(
            buffer,
            format="JPEG",
            quality=params.quality,
            subsampling=_PIL_SUBSAMPLING[params.subsampling],
            optimize=False,
        )
    else:
        table = params.table_choice or "luminance"
        # No ``quality`` here: Pillow would rescale explicit tables by it.
        pil.save(buffer, format="JPEG", qtables=[scaled_table(table, params.quality)], optimize=False)
    data = buffer.getvalue()
    logger.debug(
        "Encoded %dx%d (%d ch) at Qf=%d/%s: %d bytes",
        img.width, img.height, img.channels, params.quality, params.subsampling, len(data),
    )
    return data


def estimate_quality(table: Sequence[int], base: str = "luminance") -> Tuple[int, bool]:
    """Quality whose scaled ``base`` table equals ``table``.

    Returns ``(quality, exact)``. Without an exact match the quality of the
    nearest scaled table (L1 distance) is returned with ``exact=False``.
    """
    observed = np.asarray(table, dtype=np.int64)
    best_quality, best_distance = 100, None
    for quality in range(100, 0, -1):
        candidate = np.asarray(scaled_table(base, quality), dtype=np.int64)
        distance = int(np.abs(candidate - observed).sum())
        if distance == 0:
            return quality, True
        if best_distance is None or distance < best_distance:
            best_quality, best_distance = quality, distance
    return best_quality, False


def open_jpeg(data: bytes) -> PILImage.Image:
    try:
        pil = PILImage.open(io.BytesIO(data))
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise DecodeError(f"Not a decodable JPEG stream: {e}") from e
    if pil.format != "JPEG":
        raise DecodeError(f"Expected a JPEG stream, got {pil.format}")
    return pil


def _quant_tables(pil: PILImage.Image) -> Dict[int, List[int]]:
    tables = getattr(pil, "quantization", None) or {}
    return {int(k): list(v) for k, v in tables.items()}


def read_params(pil: PILImage.Image) -> JpegParams:
    tables = _quant_tables(pil)
    if 0 not in tables:
        raise DecodeError("JPEG stream carries no quantization table 0")
    if pil.mode == "L":
        scores = {name: estimate_quality(tables[0], name) for name in BASE_TABLES}
        exact = [name for name, (_, hit) in scores.items() if hit]
        if exact:
            choice = exact[0]
        else:
            choice = "luminance"
            logger.info("Grayscale quantization table matches no IJG table exactly; reporting nearest")
        return JpegParams(quality=scores[choice][0], subsampling="gray", table_choice=choice)
    if pil.mode != "RGB":
        raise DecodeError(f"Unsupported JPEG colour mode {pil.mode}")
    sampling = JpegImagePlugin.get_sampling(pil)
    if sampling not in _SAMPLING_NAMES:
        raise DecodeError(f"Unsupported chroma subsampling (code {sampling}); expected 4:4:4 or 4:2:0")
    quality, exact = estimate_quality(tables[0], "luminance")
    if not exact:
        logger.info("Luminance table matches no IJG quality exactly; nearest is Qf=%d", quality)
    return JpegParams(quality=quality, subsampling=_SAMPLING_NAMES[sampling])


def detect_params(data: bytes) -> JpegParams:
    """Subsampling, quality and table choice read from the headers only."""
    return read_params(open_jpeg(data))


def jpeg_decode(data: bytes) -> Tuple[Image, JpegParams]:
    pil = open_jpeg(data)
    params = read_params(pil)
    try:
        pil.load()
    except (OSError, SyntaxError) as e:
        raise DecodeError(f"Corrupt JPEG stream: {e}") from e
    return Image.from_interleaved(np.asarray(pil)), params


def ensure_grayscale(img: Image) -> Image:
    """Guard for encrypted grayscale-based images: they must never gain chroma."""
    if img.channels != 1:
        raise DecodeError(f"Expected a single-channel image after decoding, got {img.channels} channels")
    return img


def default_params(img: Image, quality: int, subsampling: Optional[str] = None, table: Optional[str] = None) -> JpegParams:
    """Parameters that suit ``img`` when the caller did not pin them down."""
    try:
        if img.channels == 1:
            return JpegParams(quality=quality, subsampling=subsampling or "gray", table_choice=table or "luminance")
        return JpegParams(quality=quality, subsampling=subsampling or "444", table_choice=table)
    except ValidationError as e:
        raise ConfigError(f"Invalid JPEG parameters: {e.errors()[0]['msg']}") from e
