"""Tests for the SNS upload/download emulator, one case per policy row."""

import numpy as np
import pytest
from Crypto.Hash import SHA256

from src.models.configs import JpegParams
from src.core.errors import ConfigError, ResolutionError
from src.models.image import Image
from src.repositories.profile_repo import ProfileRepository
from src.services.jpeg_service import detect_params, jpeg_encode
from src.services.sns_service import sns_emulate, with_qfd

@pytest.fixture(scope="module")
def profiles():
    return ProfileRepository()

@pytest.fixture
def upload(rgb_image, gray_image):
    """``upload(subsampling, quality)``: JPEG bytes of the fixture image in that format."""
    def factory(subsampling: str, quality: int) -> bytes:
        source = gray_image if subsampling == "gray" else rgb_image
        return jpeg_encode(source, JpegParams(quality=quality, subsampling=subsampling))
    return factory

def digest(data: bytes) -> str:
    return SHA256.new(data).hexdigest()

def downloaded_format(data: bytes):
    params = detect_params(data)
    return params.subsampling, params.quality

# ---------------------------------------------------------------------------
# Twitter
# ---------------------------------------------------------------------------
@pytest.mark.parametrize(
    "subsampling,quality,expected",
    [
        ("444", 85, ("420", 85)),
        ("444", 100, ("420", 85)),
        ("420", 90, ("420", 85)),
        ("420", 95, ("420", 85)),
        ("gray", 85, ("gray", 85)),
        ("gray", 95, ("gray", 85)),
    ],
)
def test_twitter_recompresses_high_quality(profiles, upload, subsampling, quality, expected):
    downloaded = sns_emulate(upload(subsampling, quality), profiles.get("twitter"))
    assert downloaded_format(downloaded) == expected

@pytest.mark.parametrize(
    "subsampling,quality",
    [("444", 84), ("444", 50), ("420", 84), ("420", 50), ("gray", 84), ("gray", 70)],
)
def test_twitter_passes_low_quality_through(profiles, upload, subsampling, quality):
    uploaded = upload(subsampling, quality)
    assert digest(sns_emulate(uploaded, profiles.get("twitter"))) == digest(uploaded)

def test_twitter_gray_output_uses_luminance_table(profiles, gray_image):
    uploaded = jpeg_encode(gray_image, JpegParams(quality=90, subsampling="gray", table_choice="chrominance"))
    params = detect_params(sns_emulate(uploaded, profiles.get("twitter")))
    assert params == JpegParams(quality=85, subsampling="gray", table_choice="luminance")

# ---------------------------------------------------------------------------
# Facebook
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("profile", ["facebook_hq", "facebook_lq"])
@pytest.mark.parametrize(
    "subsampling,quality,expected",
    [
        ("444", 95, ("420", 85)),
        ("444", 70, ("420", 85)),
        ("420", 95, ("420", 85)),
        ("420", 60, ("420", 85)),
        ("gray", 95, ("gray", 85)),
        ("gray", 50, ("gray", 85)),
    ],
)
def test_facebook_always_recompresses(profiles, upload, profile, subsampling, quality, expected):
    downloaded = sns_emulate(upload(subsampling, quality), profiles.get(profile))
    assert downloaded_format(downloaded) == expected

def test_facebook_gray_stays_gray(profiles, gray_image):
    uploaded = jpeg_encode(gray_image, JpegParams(quality=95, subsampling="gray", table_choice="chrominance"))
    params = detect_params(sns_emulate(uploaded, profiles.get("facebook_lq")))
    assert params == JpegParams(quality=85, subsampling="gray", table_choice="luminance")

@pytest.mark.parametrize("qfd", [71, 78, 85])
def test_facebook_quality_is_configurable(profiles, upload, qfd):
    profile = with_qfd(profiles.get("facebook_hq"), qfd)
    assert downloaded_format(sns_emulate(upload("444", 90), profile)) == ("420", qfd)
    assert downloaded_format(sns_emulate(upload("gray", 90), profile)) == ("gray", qfd)

@pytest.mark.parametrize("qfd", [70, 86, 90])
def test_facebook_quality_outside_range_is_rejected(profiles, qfd):
    with pytest.raises(ConfigError):
        with_qfd(profiles.get("facebook_hq"), qfd)

def test_fixed_quality_profiles_ignore_qfd(profiles):
    twitter = profiles.get("twitter")
    assert with_qfd(twitter, 71) == twitter

# ---------------------------------------------------------------------------
# Pass-through providers
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("profile", ["tumblr", "googleplus", "flickr"])
@pytest.mark.parametrize(
    "subsampling,quality",
    [("444", 95), ("444", 60), ("420", 90), ("420", 100), ("gray", 95), ("gray", 75)],
)
def test_pass_through_providers_are_byte_identical(profiles, upload, profile, subsampling, quality):
    uploaded = upload(subsampling, quality)
    assert digest(sns_emulate(uploaded, profiles.get(profile))) == digest(uploaded)

# ---------------------------------------------------------------------------
# Resolution limits
# ---------------------------------------------------------------------------
def test_oversized_uploads_are_refused(profiles):
    wide = Image(np.full((1, 8, 1000), 128, dtype=np.uint8))
    uploaded = jpeg_encode(wide, JpegParams(quality=90, subsampling="gray"))
    with pytest.raises(ResolutionError, match="960x960"):
        sns_emulate(uploaded, profiles.get("facebook_lq"))
    assert downloaded_format(sns_emulate(uploaded, profiles.get("facebook_hq"))) == ("gray", 85)

def test_tumblr_limit_applies_to_pass_through(profiles):
    tall = Image(np.full((1, 1288, 8), 128, dtype=np.uint8))
    uploaded = jpeg_encode(tall, JpegParams(quality=90, subsampling="gray"))
    with pytest.raises(ResolutionError):
        sns_emulate(uploaded, profiles.get("tumblr"))
    assert sns_emulate(uploaded, profiles.get("flickr")) == uploaded
