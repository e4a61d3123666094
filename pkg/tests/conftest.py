import logging

import numpy as np
import pytest

from src.core.security import generate_secret_key
from src.models.image import Image
from src.models.keys import SecretKey

# Configure logging for tests
def pytest_configure(config):
    """Set up logging configuration and markers when pytest starts."""
    logging.basicConfig(
        level=logging.DEBUG,
        format='%(asctime)s [%(levelname)8s] %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    config.addinivalue_line("markers", "slow: corpus-level experiments (run with -m slow)")

@pytest.fixture
def caplog(caplog):
    """Enhance the built-in caplog fixture with proper log level."""
    caplog.set_level(logging.DEBUG)
    return caplog

# ---------------------------------------------------------------------------
# Synthetic images
# ---------------------------------------------------------------------------
def _natural(width: int, height: int, seed: int, channels: int) -> Image:
    """Smooth, non-periodic content with mild texture, like a downscaled photo."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    planes = []
    for c in range(channels):
        fx, fy, phase = rng.uniform(20.0, 45.0), rng.uniform(20.0, 45.0), rng.uniform(0, np.pi)
        base = 128.0 + 70.0 * np.sin(x / fx + phase) * np.cos(y / fy - phase)
        base += 40.0 * (x / width - 0.5) + 25.0 * (y / height - 0.5) * (c - 1)
        base += rng.normal(0.0, 2.0, size=base.shape)
        planes.append(np.clip(np.round(base), 0, 255))
    return Image(np.stack(planes).astype(np.uint8))

@pytest.fixture
def make_image():
    """Factory for deterministic synthetic images: ``make_image(w, h, seed=0, channels=3)``."""
    def factory(width: int, height: int, seed: int = 0, channels: int = 3) -> Image:
        return _natural(width, height, seed, channels)
    return factory

@pytest.fixture
def rgb_image(make_image) -> Image:
    return make_image(64, 48, seed=1)

@pytest.fixture
def gray_image(make_image) -> Image:
    return make_image(64, 48, seed=2, channels=1)

# ---------------------------------------------------------------------------
# Keys
# ---------------------------------------------------------------------------
@pytest.fixture
def secret_key() -> SecretKey:
    return generate_secret_key(b"test-fixture")

@pytest.fixture
def zero_key() -> SecretKey:
    return SecretKey(bytes(32), bytes(12))

@pytest.fixture(scope="session")
def desk_corpus():
    """Five 256x192 images, the scale of the corpus-level attack runs."""
    return [_natural(256, 192, seed, 3) for seed in range(5)]
