"""On-disk formats for key files and encryption ground truth."""
import base64
import binascii
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from src.models.configs import CipherConfig, LayoutName, Scheme
from src.models.keys import MASTER_BYTES, NONCE_BYTES, SecretKey
from src.models.transform import TransformRecord


def _b64_of_length(v: str, length: int, what: str) -> str:
    try:
        raw = base64.b64decode(v, validate=True)
    except (binascii.Error, ValueError) as e:
        raise ValueError(f"{what} is not valid base64") from e
    if len(raw) != length:
        raise ValueError(f"{what} must decode to {length} bytes, got {len(raw)}")
    return v


class KeyFile(BaseModel):
    master_b64: str
    nonce_b64: str
    scheme: Scheme
    block: Tuple[int, int]
    layout: LayoutName = "horizontal"
    original_size: Optional[Tuple[int, int]] = None

    @field_validator("master_b64")
    def validate_master(cls, v: str) -> str:
        return _b64_of_length(v, MASTER_BYTES, "master_b64")

    @field_validator("nonce_b64")
    def validate_nonce(cls, v: str) -> str:
        return _b64_of_length(v, NONCE_BYTES, "nonce_b64")

    @field_validator("block")
    def validate_block(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        if v[0] < 1 or v[1] < 1:
            raise ValueError(f"Block dimensions must be positive, got {v}")
        return v

    def secret_key(self) -> SecretKey:
        return SecretKey(base64.b64decode(self.master_b64), base64.b64decode(self.nonce_b64))

    def cipher_config(self) -> CipherConfig:
        return CipherConfig(scheme=self.scheme, block=self.block, layout=self.layout)

    @classmethod
    def from_key(
        cls, sk: SecretKey, cfg: CipherConfig, original_size: Optional[Tuple[int, int]] = None
    ) -> "KeyFile":
        return cls(
            master_b64=base64.b64encode(sk.master).decode("ascii"),
            nonce_b64=base64.b64encode(sk.image_nonce).decode("ascii"),
            scheme=cfg.scheme,
            block=cfg.block_size,
            layout=cfg.layout,
            original_size=original_size,
        )


class TruthFile(BaseModel):
    """Serialized :class:`TransformRecord` of one encryption, used to score attacks."""

    scheme: Scheme
    block: int = Field(ge=1)
    cols: int = Field(ge=1)
    rows: int = Field(ge=1)
    permutation: List[int]
    poses: List[int]
    polarity: List[int]
    channel_perm: Optional[List[int]] = None

    def record(self) -> TransformRecord:
        return TransformRecord(
            permutation=np.asarray(self.permutation),
            poses=np.asarray(self.poses),
            polarity=np.asarray(self.polarity),
            cols=self.cols,
            rows=self.rows,
            channel_perm=None if self.channel_perm is None else np.asarray(self.channel_perm),
        )

    @classmethod
    def from_record(cls, record: TransformRecord, scheme: str, block: int) -> "TruthFile":
        return cls(
            scheme=scheme,
            block=block,
            cols=record.cols,
            rows=record.rows,
            permutation=record.permutation.tolist(),
            poses=record.poses.tolist(),
            polarity=record.polarity.tolist(),
            channel_perm=None if record.channel_perm is None else record.channel_perm.tolist(),
        )
