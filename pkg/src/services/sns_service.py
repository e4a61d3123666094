"""Upload/download emulation for social network services.

A profile maps the uploaded file's (subsampling, quality) to either a
byte-identical pass-through or a decode and re-encode at the provider's
output subsampling and quality. Inputs above a provider's maximum resolution
are refused instead of resized, since resizing breaks block alignment.
"""
import logging

from src.models.configs import JpegParams
from src.cli.schemas.profile import SnsProfile
from src.core.errors import ConfigError, ResolutionError
from src.services.jpeg_service import open_jpeg, read_params, jpeg_decode, jpeg_encode

logger = logging.getLogger(__name__)


def with_qfd(profile: SnsProfile, qfd: int) -> SnsProfile:
    """Profile copy whose configurable re-encode quality is ``qfd``."""
    if profile.qfd_range is None:
        return profile
    low, high = profile.qfd_range
    if not low <= qfd <= high:
        raise ConfigError(f"{profile.name} re-encodes with Qfd in [{low}, {high}], got {qfd}")
    return profile.model_copy(update={"qfd": qfd})


def check_resolution(profile: SnsProfile, width: int, height: int) -> None:
    if profile.max_w is not None and width > profile.max_w:
        raise ResolutionError(f"{width}x{height} exceeds the {profile.name} limit of {profile.limit_text()}")
    if profile.max_h is not None and height > profile.max_h:
        raise ResolutionError(f"{width}x{height} exceeds the {profile.name} limit of {profile.limit_text()}")


def sns_emulate(data: bytes, profile: SnsProfile) -> bytes:
    """What a viewer downloads after ``data`` was uploaded to the provider."""
    pil = open_jpeg(data)
    width, height = pil.size
    check_resolution(profile, width, height)
    uploaded = read_params(pil)
    rule = profile.rule_for(uploaded.subsampling, uploaded.quality)
    if rule is None or rule.passes_through:
        logger.info(
            "%s: %s upload at Qfu=%d passes through unchanged",
            profile.name, uploaded.subsampling, uploaded.quality,
        )
        return data
    qfd = profile.output_quality(rule)
    img, _ = jpeg_decode(data)
    table = "luminance" if rule.output_subsampling == "gray" else None
    params = JpegParams(quality=qfd, subsampling=rule.output_subsampling, table_choice=table)
    logger.info(
        "%s: %s upload at Qfu=%d recompressed to %s at Qfd=%d",
        profile.name, uploaded.subsampling, uploaded.quality, rule.output_subsampling, qfd,
    )
    return jpeg_encode(img, params)
