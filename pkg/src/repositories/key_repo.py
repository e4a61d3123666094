"""Repository for key files and encryption ground-truth records."""
import json
import logging
import os
from pathlib import Path

from pydantic import ValidationError

from src.cli.schemas.keyfile import KeyFile, TruthFile
from src.core.errors import DimensionError, KeyFileError

logger = logging.getLogger(__name__)

OWNER_READ_ONLY = 0o400


class KeyRepository:
    def load(self, path: Path) -> KeyFile:
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError as e:
            raise KeyFileError(f"Key file not found: {path}") from e
        except (OSError, json.JSONDecodeError) as e:
            raise KeyFileError(f"Cannot read key file {path}: {e}") from e
        try:
            return KeyFile(**raw)
        except (ValidationError, TypeError) as e:
            raise KeyFileError(f"Malformed key file {path}: {e}") from e

    def save(self, keyfile: KeyFile, path: Path) -> Path:
        """Write the key file and make it owner-read-only where the platform allows."""
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            if path.exists():
                # A previous key file is read-only; replace rather than open for writing.
                path.unlink()
            path.write_text(keyfile.model_dump_json(indent=2) + "\n")
        except OSError as e:
            raise KeyFileError(f"Cannot write key file {path}: {e}") from e
        try:
            os.chmod(path, OWNER_READ_ONLY)
        except (OSError, NotImplementedError):
            logger.warning("Could not restrict permissions of %s", path)
        return path

    def load_truth(self, path: Path) -> TruthFile:
        path = Path(path)
        try:
            truth = TruthFile(**json.loads(path.read_text()))
            truth.record()
        except FileNotFoundError as e:
            raise KeyFileError(f"Truth record not found: {path}") from e
        except (OSError, json.JSONDecodeError, ValidationError, TypeError, DimensionError) as e:
            raise KeyFileError(f"Malformed truth record {path}: {e}") from e
        return truth

    def save_truth(self, truth: TruthFile, path: Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(truth.model_dump_json() + "\n")
        except OSError as e:
            raise KeyFileError(f"Cannot write truth record {path}: {e}") from e
        return path
