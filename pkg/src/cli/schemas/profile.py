"""SNS recompression policies (one profile per provider)."""
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models.configs import Subsampling


class SnsRule(BaseModel):
    """Uploaded (subsampling, Qfu range) -> downloaded (subsampling, Qfd), or pass-through."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    input_subsampling: Subsampling = Field(alias="input")
    qfu_min: int = Field(default=1, ge=1, le=100)
    qfu_max: int = Field(default=100, ge=1, le=100)
    output_subsampling: Optional[Subsampling] = Field(default=None, alias="output")
    # None means the profile's configured Qfd.
    qfd: Optional[int] = Field(default=None, ge=1, le=100)

    @property
    def passes_through(self) -> bool:
        return self.output_subsampling is None

    def matches(self, subsampling: str, qfu: int) -> bool:
        return subsampling == self.input_subsampling and self.qfu_min <= qfu <= self.qfu_max


class SnsProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    max_w: Optional[int] = Field(default=None, ge=1)
    max_h: Optional[int] = Field(default=None, ge=1)
    qfd: int = Field(default=85, ge=1, le=100)
    qfd_range: Optional[Tuple[int, int]] = None
    rules: List[SnsRule]

    @field_validator("rules")
    def validate_rules(cls, v: List[SnsRule]) -> List[SnsRule]:
        if not v:
            raise ValueError("A profile needs at least one rule")
        for rule in v:
            if rule.qfu_min > rule.qfu_max:
                raise ValueError(f"Empty Qfu range {rule.qfu_min}..{rule.qfu_max}")
        return v

    def rule_for(self, subsampling: str, qfu: int) -> Optional[SnsRule]:
        for rule in self.rules:
            if rule.matches(subsampling, qfu):
                return rule
        return None

    def output_quality(self, rule: SnsRule) -> int:
        return rule.qfd if rule.qfd is not None else self.qfd

    def limit_text(self) -> str:
        if self.max_w is None or self.max_h is None:
            return "unlimited"
        return f"{self.max_w}x{self.max_h}"
