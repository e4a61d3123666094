"""Secret material for the block-scrambling ciphers."""
from __future__ import annotations

from dataclasses import dataclass

from src.core.errors import KeyFileError

MASTER_BYTES = 32
NONCE_BYTES = 12
SUBKEY_BYTES = 32


@dataclass(frozen=True)
class SecretKey:
    """Master secret plus the per-image nonce.

    The repr deliberately shows neither field; use
    :func:`src.core.security.key_fingerprint` when a key has to be identified in logs.
    """

    master: bytes
    image_nonce: bytes

    def __post_init__(self) -> None:
        if len(self.master) != MASTER_BYTES:
            raise KeyFileError(f"Master secret must be {MASTER_BYTES} bytes, got {len(self.master)}")
        if len(self.image_nonce) != NONCE_BYTES:
            raise KeyFileError(f"Image nonce must be {NONCE_BYTES} bytes, got {len(self.image_nonce)}")

    def __repr__(self) -> str:
        return "SecretKey(<hidden>)"


@dataclass(frozen=True)
class StepKeys:
    """Subkeys K1..K4 driving permutation, pose, polarity and channel-shuffle draws."""

    k1: bytes
    k2: bytes
    k3: bytes
    k4: bytes

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4"):
            if len(getattr(self, name)) != SUBKEY_BYTES:
                raise KeyFileError(f"Step key {name} must be {SUBKEY_BYTES} bytes")

    def __repr__(self) -> str:
        return "StepKeys(<hidden>)"
