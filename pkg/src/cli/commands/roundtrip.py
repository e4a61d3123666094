"""Upload/download experiments: one image through JPEG and an optional SNS."""
import logging
from pathlib import Path
from typing import Optional

import typer

from src.cli.deps import emit_rows, handle_errors, parse_table, state, write_manifest
from src.cli.schemas.profile import SnsProfile
from src.cli.schemas.reports import RoundtripReport
from src.core.config import Settings
from src.repositories.image_repo import ImageRepository
from src.repositories.key_repo import KeyRepository
from src.repositories.profile_repo import ProfileRepository
from src.services.jpeg_service import detect_params
from src.services.rd_service import roundtrip as run_roundtrip
from src.services.sns_service import sns_emulate, with_qfd

logger = logging.getLogger(__name__)


def _profile(settings: Settings, name: str) -> Optional[SnsProfile]:
    if name == "none":
        return None
    profile = ProfileRepository(settings.profile_dir).get(name)
    if profile.qfd_range is not None:
        profile = with_qfd(profile, settings.facebook_qfd)
    return profile


@handle_errors
def roundtrip(
    ctx: typer.Context,
    in_img: Path = typer.Argument(..., help="Original image"),
    key_file: Optional[Path] = typer.Argument(None, help="Key file; omit for the unencrypted baseline"),
    qf: int = typer.Option(75, "--qf", help="JPEG quality factor of the upload"),
    subsampling: Optional[str] = typer.Option(None, help="444, 420 or gray (follows the image when omitted)"),
    table: Optional[str] = typer.Option(None, help="lum or chrom table for grayscale uploads"),
    sns: str = typer.Option("none", "--sns", help="SNS profile to pass through, or none"),
    decrypted: Optional[Path] = typer.Option(None, help="Also save the decrypted image"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV/JSON report (stdout when omitted)"),
):
    """Encrypt, compress, optionally pass through an SNS, decompress and decrypt; report PSNR."""
    settings = state(ctx).settings
    images = ImageRepository()
    original = images.load(in_img)
    key, cfg = None, None
    if key_file is not None:
        keyfile = KeyRepository().load(key_file)
        key, cfg = keyfile.secret_key(), keyfile.cipher_config()
    profile = _profile(settings, sns)
    result = run_roundtrip(original, key, cfg, qf, subsampling, parse_table(table), profile)
    if decrypted is not None:
        images.save(result.decrypted, decrypted)

    used_subsampling = subsampling
    if used_subsampling is None:
        sent_channels = 1 if cfg is not None and cfg.scheme != "conventional" else original.channels
        used_subsampling = "gray" if sent_channels == 1 else "444"
    report = RoundtripReport(
        image_id=in_img.stem,
        scheme=cfg.scheme if cfg is not None else "plain",
        block=cfg.block_size[0] if cfg is not None else None,
        qf=qf,
        subsampling=used_subsampling,
        table=parse_table(table),
        sns=sns,
        uploaded_bytes=result.uploaded_bytes,
        downloaded_bytes=result.downloaded_bytes,
        bpp=result.bpp,
        psnr_db=result.psnr_db,
    )
    printed = emit_rows([report], out)
    inputs = {"image": in_img}
    if key_file is not None:
        inputs["key"] = key_file
    outputs = {"report": out} if out is not None else {}
    if decrypted is not None:
        outputs["decrypted"] = decrypted
    write_manifest(
        ctx,
        "roundtrip",
        {"qf": qf, "subsampling": used_subsampling, "table": table, "sns": sns},
        inputs=inputs,
        outputs=outputs,
        out=out,
        stdout=printed,
    )


@handle_errors
def sns(
    ctx: typer.Context,
    in_jpeg: Path = typer.Argument(..., help="JPEG file as uploaded"),
    profile_name: str = typer.Option(..., "--sns", help="SNS profile"),
    out: Path = typer.Option(..., "--out", help="JPEG file as downloaded"),
):
    """Emulate one upload/download of a JPEG file through an SNS."""
    settings = state(ctx).settings
    images = ImageRepository()
    data = images.load_bytes(in_jpeg)
    profile = _profile(settings, profile_name)
    downloaded = sns_emulate(data, profile) if profile is not None else data
    images.save_bytes(downloaded, out)
    params = detect_params(downloaded)
    typer.echo(f"{params.subsampling},{params.quality}")
    write_manifest(
        ctx,
        "sns",
        {"sns": profile_name},
        inputs={"jpeg": in_jpeg},
        outputs={"jpeg": out},
        out=out,
    )

