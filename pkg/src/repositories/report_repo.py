"""Repository for report tables (CSV/JSON) and run manifests."""
import json
import logging
from pathlib import Path
from typing import Sequence

import pandas as pd
from pydantic import BaseModel

from src.cli.schemas.reports import RunManifest
from src.core.errors import ConfigError

logger = logging.getLogger(__name__)


class ReportRepository:
    def _records(self, rows: Sequence[BaseModel]) -> list:
        # Aliases carry the published column names (Dc, Nc, Lc).
        return [row.model_dump(mode="json", by_alias=True) for row in rows]

    def to_csv(self, rows: Sequence[BaseModel]) -> str:
        return pd.DataFrame(self._records(rows)).to_csv(index=False, lineterminator="\n")

    def to_json(self, rows: Sequence[BaseModel]) -> str:
        return json.dumps(self._records(rows), indent=2)

    def write(self, rows: Sequence[BaseModel], path: Path) -> Path:
        """CSV unless the suffix is ``.json``."""
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            if path.suffix.lower() == ".json":
                path.write_text(self.to_json(rows) + "\n")
            else:
                path.write_text(self.to_csv(rows))
        except OSError as e:
            raise ConfigError(f"Cannot write report {path}: {e}") from e
        logger.info("Wrote %d report row(s) to %s", len(rows), path)
        return path

    def write_manifest(self, manifest: RunManifest, path: Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(manifest.model_dump_json(indent=2) + "\n")
        except OSError as e:
            raise ConfigError(f"Cannot write run manifest {path}: {e}") from e
        return path
