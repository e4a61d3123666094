"""Parameter sets for the cipher, the JPEG codec and the jigsaw solver."""
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

Scheme = Literal["conventional", "grayscale", "luminance"]
Subsampling = Literal["444", "420", "gray"]
TableChoice = Literal["luminance", "chrominance"]
LayoutName = Literal["horizontal", "vertical"]

# Smallest block each scheme keeps JPEG-compatible (conventional must survive 4:2:0).
DEFAULT_BLOCK = {"conventional": 16, "grayscale": 8, "luminance": 16}


class CipherConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: Scheme = "grayscale"
    block: Optional[Tuple[int, int]] = Field(default=None, description="(Bx, By); scheme default when omitted")
    layout: LayoutName = "horizontal"

    @field_validator("block")
    def validate_block(cls, v: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
        if v is not None and (v[0] < 1 or v[1] < 1):
            raise ValueError(f"Block dimensions must be positive, got {v}")
        return v

    @property
    def block_size(self) -> Tuple[int, int]:
        if self.block is None:
            size = DEFAULT_BLOCK[self.scheme]
            return (size, size)
        return self.block

    @property
    def recommended_block(self) -> bool:
        size = DEFAULT_BLOCK[self.scheme]
        return self.block_size == (size, size)


class JpegParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    quality: int = Field(default=75, ge=1, le=100)
    subsampling: Subsampling = "444"
    table_choice: Optional[TableChoice] = None


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    compatibility: Literal["mgc", "ssd"] = "mgc"
    variant_search: bool = True
    channel_search: bool = False
    # Per boundary, keep only the cheaper polarity of each pose.
    prune_polarity: bool = True
    seed: int = 0
    time_budget: float = Field(default=1800.0, gt=0)
    # Ridge added to the MGC gradient covariance.
    epsilon: float = Field(default=1.0, gt=0)
