"""Repository for SNS recompression policy files."""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

from src.cli.schemas.profile import SnsProfile
from src.core.config import STATIC_DIR
from src.core.errors import ConfigError

logger = logging.getLogger(__name__)

BUNDLED_PROFILES = STATIC_DIR / "sns_profiles.json"


class ProfileRepository:
    """Loads provider profiles from the bundled policy file, or every ``*.json`` in a directory.

    Files in ``profile_dir`` override bundled profiles of the same name.
    """

    def __init__(self, profile_dir: Optional[Path] = None):
        self.profile_dir = Path(profile_dir) if profile_dir is not None else None
        self._cache: Dict[str, SnsProfile] | None = None

    def _load_file(self, path: Path) -> Dict[str, SnsProfile]:
        try:
            raw = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read SNS policy file {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"SNS policy file {path} must map profile names to policies")
        profiles: Dict[str, SnsProfile] = {}
        for name, body in raw.items():
            try:
                profiles[name] = SnsProfile(name=name, **body)
            except (ValidationError, TypeError) as e:
                raise ConfigError(f"Invalid SNS profile '{name}' in {path}: {e}") from e
        return profiles

    def _profiles(self) -> Dict[str, SnsProfile]:
        if self._cache is not None:
            return self._cache
        profiles = self._load_file(BUNDLED_PROFILES)
        if self.profile_dir is not None:
            if not self.profile_dir.is_dir():
                raise ConfigError(f"SNS profile directory {self.profile_dir} does not exist")
            for path in sorted(self.profile_dir.glob("*.json")):
                logger.debug("Loading SNS policies from %s", path)
                profiles.update(self._load_file(path))
        self._cache = profiles
        return profiles

    def names(self) -> List[str]:
        return sorted(self._profiles())

    def get(self, name: str) -> SnsProfile:
        profiles = self._profiles()
        if name not in profiles:
            raise ConfigError(f"Unknown SNS profile '{name}' (known: {', '.join(sorted(profiles))})")
        return profiles[name]
