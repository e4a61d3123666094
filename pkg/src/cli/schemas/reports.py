"""Report rows emitted by the analysis, codec and attack commands."""
import math
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_serializer


def _psnr_out(v: float) -> Union[float, str]:
    # +inf for identical images; "inf" keeps CSV/JSON free of NaN-like tokens.
    return "inf" if math.isinf(v) else round(v, 4)


class KeySpaceReport(BaseModel):
    n: int = Field(ge=0, description="Block count of the original image")
    n_s: int
    n_ri: int
    n_n: int
    n_c: int
    n_a: int
    n_b: int
    log2_n_a: float
    log2_n_b: float


class SchemeProperties(BaseModel):
    scheme: str
    color_channel: str
    minimum_block: Tuple[int, int]
    encrypted_width: int
    encrypted_height: int
    blocks: int
    keyspace_log2: float
    chroma_subsampling: str


class AssemblyScore(BaseModel):
    dc: float = Field(ge=0.0, le=1.0)
    nc: float = Field(ge=0.0, le=1.0)
    lc: float = Field(ge=0.0, le=1.0)

    @property
    def total(self) -> float:
        return self.dc + self.nc + self.lc


class AttackReport(BaseModel):
    image_id: str
    scheme: str
    block: int
    dc: float = Field(serialization_alias="Dc")
    nc: float = Field(serialization_alias="Nc")
    lc: float = Field(serialization_alias="Lc")
    psnr_db: float
    trials: int = 1
    # Wall-clock; excluded from serialized rows (see the run manifest timings).
    solve_seconds: float = Field(default=0.0, exclude=True)

    @field_serializer("psnr_db")
    def serialize_psnr(self, v: float) -> Union[float, str]:
        return _psnr_out(v)


class RoundtripReport(BaseModel):
    image_id: str
    scheme: str
    block: Optional[int] = None
    qf: int
    subsampling: str
    table: Optional[str] = None
    sns: str = "none"
    uploaded_bytes: int
    downloaded_bytes: int
    bpp: float
    psnr_db: float

    @field_serializer("psnr_db")
    def serialize_psnr(self, v: float) -> Union[float, str]:
        return _psnr_out(v)


class RdPoint(BaseModel):
    scheme: str
    qf: int
    bpp: float
    psnr_db: float

    @field_serializer("psnr_db")
    def serialize_psnr(self, v: float) -> Union[float, str]:
        return _psnr_out(v)


class RunManifest(BaseModel):
    command: str
    parameters: Dict[str, Union[str, int, float, bool, None, List[str], List[int]]]
    input_hashes: Dict[str, str] = Field(default_factory=dict)
    output_hashes: Dict[str, str] = Field(default_factory=dict)
    tool_version: str
    timings: Dict[str, float] = Field(default_factory=dict)
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
