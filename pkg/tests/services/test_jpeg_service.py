"""Tests for the JPEG codec wrapper."""

import pytest

from src.models.configs import JpegParams
from src.core.errors import ConfigError, DecodeError
from src.services.analysis_service import psnr
from src.services.jpeg_service import (
    default_params,
    detect_params,
    estimate_quality,
    jpeg_decode,
    jpeg_encode,
)
from src.services.static_references.ijg_tables import scaled_table

# ---------------------------------------------------------------------------
# Codec
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("quality", [10, 25, 50, 75, 90, 95])
@pytest.mark.parametrize("base", ["luminance", "chrominance"])
def test_estimate_quality_inverts_scaling(quality, base):
    assert estimate_quality(scaled_table(base, quality), base) == (quality, True)

def test_estimate_quality_falls_back_to_nearest():
    table = scaled_table("luminance", 60)
    table[0] += 1
    quality, exact = estimate_quality(table)
    assert not exact
    assert abs(quality - 60) <= 1

@pytest.mark.parametrize("subsampling", ["444", "420"])
@pytest.mark.parametrize("quality", [60, 85, 95])
def test_colour_parameters_are_detected(rgb_image, subsampling, quality):
    data = jpeg_encode(rgb_image, JpegParams(quality=quality, subsampling=subsampling))
    params = detect_params(data)
    assert (params.subsampling, params.quality) == (subsampling, quality)

@pytest.mark.parametrize("table", ["luminance", "chrominance"])
def test_grayscale_table_choice_is_detected(gray_image, table):
    data = jpeg_encode(gray_image, JpegParams(quality=80, subsampling="gray", table_choice=table))
    img, params = jpeg_decode(data)
    assert img.shape == gray_image.shape
    assert params == JpegParams(quality=80, subsampling="gray", table_choice=table)

def test_high_quality_decodes_close_to_source(rgb_image):
    img, _ = jpeg_decode(jpeg_encode(rgb_image, JpegParams(quality=95, subsampling="444")))
    assert psnr(rgb_image, img) > 35.0

def test_parameter_combinations(gray_image, rgb_image):
    with pytest.raises(ConfigError):
        jpeg_encode(gray_image, JpegParams(quality=75, subsampling="444"))
    with pytest.raises(ConfigError):
        jpeg_encode(rgb_image, JpegParams(quality=75, subsampling="gray"))
    with pytest.raises(ConfigError):
        default_params(rgb_image, 75, subsampling="422")
    assert default_params(gray_image, 70) == JpegParams(quality=70, subsampling="gray", table_choice="luminance")

def test_garbage_is_not_decodable():
    with pytest.raises(DecodeError):
        jpeg_decode(b"not a jpeg at all")
