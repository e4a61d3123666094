"""Key generation."""
import logging
from pathlib import Path
from typing import Optional

import typer

from src.cli.deps import cipher_config, handle_errors, parse_seed, write_manifest
from src.cli.schemas.keyfile import KeyFile
from src.core.security import generate_secret_key, key_fingerprint
from src.repositories.key_repo import KeyRepository

logger = logging.getLogger(__name__)


@handle_errors
def keygen(
    ctx: typer.Context,
    out: Path = typer.Option(..., "--out", help="Key file to write"),
    scheme: str = typer.Option("grayscale", help="conventional, grayscale or luminance"),
    block: Optional[int] = typer.Option(None, help="Block size (scheme default when omitted)"),
    layout: str = typer.Option("h", help="Plane layout of the grayscale-based image: h or v"),
    seed: Optional[str] = typer.Option(None, help="Hex seed for a reproducible key"),
):
    """Generate a secret key and write it as a key file."""
    cfg = cipher_config(scheme, block, layout)
    sk = generate_secret_key(parse_seed(seed))
    KeyRepository().save(KeyFile.from_key(sk, cfg), out)
    logger.info("Wrote %s key %s to %s", scheme, key_fingerprint(sk), out)
    write_manifest(
        ctx,
        "keygen",
        {"scheme": scheme, "block": cfg.block_size[0], "layout": cfg.layout, "seeded": seed is not None},
        inputs={},
        outputs={"key": out},
        out=out,
    )
