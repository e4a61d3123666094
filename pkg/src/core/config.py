"""Application settings.

Values come from built-in defaults, then the environment (a ``.env`` file is
loaded first when present), then an optional YAML config file, and finally
command-line flags, which the CLI applies with :meth:`Settings.with_overrides`.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.core.errors import ConfigError

load_dotenv()

ENV_PREFIX = "ETC_"
STATIC_DIR = Path(__file__).resolve().parent.parent / "services" / "static_references"


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    profile_dir: Optional[Path] = Field(default=None, description="Directory of SNS policy JSON files")
    log_level: str = "WARNING"
    manifest_dir: Path = Path(".etc-runs")
    facebook_qfd: int = Field(default=85, ge=71, le=85)
    solver_time_budget: float = Field(default=1800.0, gt=0)
    workers: int = Field(default=1, ge=1)
    solver: Dict[str, Any] = Field(default_factory=dict)
    jpeg: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("log_level")
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level

    def with_overrides(self, **overrides: Any) -> "Settings":
        """Return a copy with non-None overrides applied (flags win over everything)."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return Settings(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid setting override: {e.errors()[0]['msg']}") from e


_ENV_FIELDS = ("profile_dir", "log_level", "manifest_dir", "facebook_qfd", "solver_time_budget", "workers")


def _from_environment() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for name in _ENV_FIELDS:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw not in (None, ""):
            values[name] = raw
    return values


def _from_config_file(path: Path) -> Dict[str, Any]:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Config file {path} is not valid YAML: {e}") from e
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"Config file {path} must contain a mapping, got {type(raw).__name__}")
    return raw


def load_settings(config_file: Optional[Path] = None) -> Settings:
    """Build settings from defaults < environment < config file."""
    values = _from_environment()
    if config_file is not None:
        values.update(_from_config_file(config_file))
    try:
        return Settings(**values)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ConfigError(f"Invalid setting '{where}': {first['msg']}") from e


settings = load_settings()
