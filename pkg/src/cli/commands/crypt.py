"""Encryption and decryption of image files with a key file."""
import logging
from pathlib import Path
from typing import Optional

import typer

from src.cli.deps import handle_errors, write_manifest
from src.cli.schemas.keyfile import TruthFile
from src.repositories.image_repo import ImageRepository
from src.repositories.key_repo import KeyRepository
from src.services.cipher_service import decrypt_image, encrypt_image

logger = logging.getLogger(__name__)


@handle_errors
def encrypt(
    ctx: typer.Context,
    in_img: Path = typer.Argument(..., help="Plain image (PPM/PGM/PNG)"),
    key_file: Path = typer.Argument(..., help="Key file from keygen"),
    out_img: Path = typer.Argument(..., help="Encrypted image to write (lossless)"),
    truth: Optional[Path] = typer.Option(None, help="Also write the transform record for attack scoring"),
):
    """Encrypt an image with the scheme recorded in the key file."""
    keys = KeyRepository()
    keyfile = keys.load(key_file)
    images = ImageRepository()
    cfg = keyfile.cipher_config()
    img = images.load(in_img)
    enc, record = encrypt_image(img, keyfile.secret_key(), cfg)
    images.save(enc, out_img)
    outputs = {"image": out_img}
    size = (img.width, img.height)
    if keyfile.original_size != size:
        if keyfile.original_size is not None:
            logger.warning(
                "Key file %s was bound to a %dx%d image, rebinding to %dx%d",
                key_file, *keyfile.original_size, *size,
            )
        # decrypt checks the encrypted dimensions against this size
        keys.save(keyfile.model_copy(update={"original_size": size}), key_file)
        outputs["key"] = key_file
    if truth is not None:
        keys.save_truth(TruthFile.from_record(record, cfg.scheme, cfg.block_size[0]), truth)
        outputs["truth"] = truth
    write_manifest(
        ctx,
        "encrypt",
        {"scheme": cfg.scheme, "block": cfg.block_size[0], "layout": cfg.layout},
        inputs={"image": in_img, "key": key_file},
        outputs=outputs,
        out=out_img,
    )


@handle_errors
def decrypt(
    ctx: typer.Context,
    in_img: Path = typer.Argument(..., help="Encrypted image, lossless or a downloaded JPEG"),
    key_file: Path = typer.Argument(..., help="Key file used for encryption"),
    out_img: Path = typer.Argument(..., help="Decrypted image to write (lossless)"),
):
    """Decrypt an image; the size recorded by encrypt must match, otherwise it is inferred."""
    keyfile = KeyRepository().load(key_file)
    images = ImageRepository()
    cfg = keyfile.cipher_config()
    plain = decrypt_image(images.load(in_img), keyfile.secret_key(), cfg, keyfile.original_size)
    images.save(plain, out_img)
    write_manifest(
        ctx,
        "decrypt",
        {"scheme": cfg.scheme, "block": cfg.block_size[0], "layout": cfg.layout},
        inputs={"image": in_img, "key": key_file},
        outputs={"image": out_img},
        out=out_img,
    )
