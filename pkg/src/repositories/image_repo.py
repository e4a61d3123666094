"""Repository for image files: lossless rasters (PPM/PGM/PNG) and JPEG byte streams."""
import logging
from pathlib import Path
from typing import List

import numpy as np
from Crypto.Hash import SHA256
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from src.core.errors import ChannelCountError, ConfigError, DecodeError
from src.models.image import Image

logger = logging.getLogger(__name__)

LOSSLESS_FORMATS = {".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM", ".png": "PNG"}
JPEG_SUFFIXES = {".jpg", ".jpeg", ".jfif"}
CORPUS_SUFFIXES = set(LOSSLESS_FORMATS) | JPEG_SUFFIXES | {".bmp", ".tif", ".tiff"}


def file_digest(path: Path) -> str:
    return SHA256.new(Path(path).read_bytes()).hexdigest()


class ImageRepository:
    def load(self, path: Path) -> Image:
        path = Path(path)
        try:
            with PILImage.open(path) as pil:
                pil.load()
                mode = pil.mode
                if mode in ("1", "P"):
                    pil = pil.convert("RGB" if mode == "P" else "L")
                    mode = pil.mode
                if mode not in ("L", "RGB"):
                    raise ChannelCountError(f"{path} has mode {mode}; only 8-bit grayscale or RGB images are supported")
                array = np.asarray(pil)
        except FileNotFoundError as e:
            raise DecodeError(f"Image file not found: {path}") from e
        except (UnidentifiedImageError, OSError, SyntaxError) as e:
            raise DecodeError(f"Cannot decode image {path}: {e}") from e
        img = Image.from_interleaved(array)
        logger.debug("Loaded %s: %dx%d, %d channel(s)", path, img.width, img.height, img.channels)
        return img

    def save(self, img: Image, path: Path) -> Path:
        """Write losslessly; the format follows the file suffix."""
        path = Path(path)
        fmt = LOSSLESS_FORMATS.get(path.suffix.lower())
        if fmt is None:
            raise ConfigError(
                f"Cannot infer a lossless format from '{path.suffix}'; use one of {', '.join(sorted(LOSSLESS_FORMATS))}"
            )
        path.parent.mkdir(parents=True, exist_ok=True)
        PILImage.fromarray(img.to_interleaved()).save(path, format=fmt)
        return path

    def load_bytes(self, path: Path) -> bytes:
        try:
            return Path(path).read_bytes()
        except OSError as e:
            raise DecodeError(f"Cannot read {path}: {e}") from e

    def save_bytes(self, data: bytes, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        return path

    def corpus(self, directory: Path) -> List[Path]:
        """Image files directly inside ``directory``, sorted by name."""
        directory = Path(directory)
        if not directory.is_dir():
            raise ConfigError(f"Corpus directory {directory} does not exist")
        paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in CORPUS_SUFFIXES)
        if not paths:
            raise ConfigError(f"No images found in {directory}")
        return paths
