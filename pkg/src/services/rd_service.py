"""Upload/download round trips and rate-distortion curves.

A round trip is: encrypt (optional), JPEG-encode, pass through an SNS
profile (optional), decode, decrypt (optional), then PSNR against the
original. RD curves average PSNR and bits per pixel of such round trips over
a corpus for each quality factor.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.models.configs import CipherConfig  # noqa: E402
from src.cli.schemas.profile import SnsProfile  # noqa: E402
from src.cli.schemas.reports import RdPoint  # noqa: E402
from src.core.errors import ConfigError  # noqa: E402
from src.core.security import trial_key  # noqa: E402
from src.models.image import Image  # noqa: E402
from src.models.keys import SecretKey  # noqa: E402
from src.services.analysis_service import psnr  # noqa: E402
from src.services.cipher_service import luminance_plane, decrypt_image, encrypt_image  # noqa: E402
from src.services.jpeg_service import default_params, ensure_grayscale, jpeg_decode, jpeg_encode  # noqa: E402
from src.services.sns_service import sns_emulate  # noqa: E402

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RdScheme:
    """One curve: which cipher (if any) runs before which JPEG setting."""

    name: str
    cipher: Optional[str]
    subsampling: Optional[str]
    table: Optional[str] = None


RD_SCHEMES: Dict[str, RdScheme] = {
    s.name: s
    for s in (
        RdScheme("plain-444", None, "444"),
        RdScheme("plain-420", None, "420"),
        RdScheme("conventional-444", "conventional", "444"),
        RdScheme("conventional-420", "conventional", "420"),
        RdScheme("proposed-lum", "grayscale", None, "luminance"),
        RdScheme("proposed-chrom", "grayscale", None, "chrominance"),
    )
}


@dataclass(frozen=True)
class RoundtripResult:
    decrypted: Image
    psnr_db: float
    uploaded_bytes: int
    downloaded_bytes: int
    bpp: float


def roundtrip(
    original: Image,
    key: Optional[SecretKey],
    cipher_cfg: Optional[CipherConfig],
    quality: int,
    subsampling: Optional[str] = None,
    table: Optional[str] = None,
    profile: Optional[SnsProfile] = None,
) -> RoundtripResult:
    """Send ``original`` through the whole EtC pipeline; ``key=None`` is the unencrypted baseline."""
    if key is not None and cipher_cfg is None:
        raise ConfigError("A cipher configuration is needed to encrypt")
    if key is not None:
        sent, _ = encrypt_image(original, key, cipher_cfg)
    else:
        sent = original
    params = default_params(sent, quality, subsampling, table)
    uploaded = jpeg_encode(sent, params)
    downloaded = sns_emulate(uploaded, profile) if profile is not None else uploaded
    received, _ = jpeg_decode(downloaded)

    reference = original
    if key is not None:
        if cipher_cfg.scheme in ("grayscale", "luminance"):
            ensure_grayscale(received)
        size = (original.width, original.height)
        restored = decrypt_image(received, key, cipher_cfg, original_size=size)
        if cipher_cfg.scheme == "luminance":
            reference = luminance_plane(original)
    else:
        restored = received

    score = psnr(reference, restored)
    bpp = len(downloaded) * 8 / (original.width * original.height)
    logger.debug("Round trip Qf=%d: %d -> %d bytes, %.2f dB", quality, len(uploaded), len(downloaded), score)
    return RoundtripResult(restored, score, len(uploaded), len(downloaded), bpp)


def _corpus_point(args: Tuple[Image, int, RdScheme, int, bytes]) -> Tuple[float, float]:
    img, index, scheme, quality, seed = args
    key = trial_key(seed, index) if scheme.cipher else None
    cfg = CipherConfig(scheme=scheme.cipher) if scheme.cipher else None
    result = roundtrip(img, key, cfg, quality, scheme.subsampling, scheme.table)
    return result.bpp, result.psnr_db


def rd_curve(
    corpus: Sequence[Image],
    scheme: str,
    qualities: Sequence[int],
    seed: bytes = b"rd",
    workers: int = 1,
) -> List[RdPoint]:
    """Corpus-average (bpp, PSNR) per quality factor for one scheme."""
    if not corpus:
        raise ConfigError("RD curves need a non-empty corpus")
    if scheme not in RD_SCHEMES:
        raise ConfigError(f"Unknown RD scheme '{scheme}' (known: {', '.join(RD_SCHEMES)})")
    rd_scheme = RD_SCHEMES[scheme]
    points: List[RdPoint] = []
    for quality in qualities:
        jobs = [(img, i, rd_scheme, quality, seed) for i, img in enumerate(corpus)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_corpus_point, jobs))
        else:
            results = [_corpus_point(job) for job in jobs]
        bpp = float(np.mean([r[0] for r in results]))
        mean_psnr = float(np.mean([r[1] for r in results]))
        points.append(RdPoint(scheme=scheme, qf=quality, bpp=bpp, psnr_db=mean_psnr))
        logger.info("%s Qf=%d: %.3f bpp, %.2f dB", scheme, quality, bpp, mean_psnr)
    return points


def plot_rd_curves(curves: Dict[str, List[RdPoint]], path: Path, title: str = "Rate-distortion") -> Path:
    fig, ax = plt.subplots()
    ax.set(xlabel="Bits per pixel [bpp]", ylabel="PSNR [dB]")
    ax.set_title(title)
    for name, points in curves.items():
        finite = [p for p in points if np.isfinite(p.psnr_db)]
        ax.plot([p.bpp for p in finite], [p.psnr_db for p in finite], marker="x", linestyle="-", label=name)
    ax.grid(True, linestyle=":")
    ax.legend()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=192, bbox_inches="tight")
    plt.close(fig)
    return path
