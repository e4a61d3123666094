"""Shared plumbing for the commands: settings, error reporting, outputs and run manifests."""
import functools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, TypeVar

import typer
from Crypto.Hash import SHA256
from pydantic import BaseModel, ValidationError

from src.models.configs import CipherConfig, SolverConfig
from src.cli.schemas.reports import RunManifest
from src.core.config import Settings
from src.core.errors import ConfigError, EtcError
from src.repositories.image_repo import file_digest
from src.repositories.report_repo import ReportRepository

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.1.0"

LAYOUTS = {"h": "horizontal", "v": "vertical", "horizontal": "horizontal", "vertical": "vertical"}
TABLES = {"lum": "luminance", "chrom": "chrominance", "luminance": "luminance", "chrominance": "chrominance"}

F = TypeVar("F", bound=Callable[..., Any])


@dataclass(frozen=True)
class AppState:
    settings: Settings
    verbosity: int = 0


def state(ctx: typer.Context) -> AppState:
    if not isinstance(ctx.obj, AppState):
        raise ConfigError("Command invoked without application state")
    return ctx.obj


def handle_errors(fn: F) -> F:
    """Print domain errors as ``CODE: message`` on stderr and exit with status 1."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except EtcError as e:
            typer.echo(str(e), err=True)
            raise typer.Exit(code=1)

    return wrapper  # type: ignore[return-value]


# ---------------- Flag parsing -----------------
def parse_layout(value: str) -> str:
    if value not in LAYOUTS:
        raise ConfigError(f"Unknown layout '{value}' (expected h or v)")
    return LAYOUTS[value]


def parse_table(value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    if value not in TABLES:
        raise ConfigError(f"Unknown quantization table '{value}' (expected lum or chrom)")
    return TABLES[value]


def parse_seed(value: Optional[str]) -> Optional[bytes]:
    if value is None:
        return None
    try:
        return bytes.fromhex(value)
    except ValueError as e:
        raise ConfigError(f"Seed must be a hexadecimal string, got '{value}'") from e


def parse_int_list(value: str, what: str) -> list:
    try:
        items = [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"{what} must be a comma-separated list of integers, got '{value}'") from e
    if not items:
        raise ConfigError(f"{what} is empty")
    return items


def solver_config(settings: Settings, **flags: Any) -> SolverConfig:
    """Solver parameters: flags over the config file's ``solver:`` map over the time budget setting."""
    values: Dict[str, Any] = {"time_budget": settings.solver_time_budget}
    values.update(settings.solver)
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return SolverConfig(**values)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ConfigError(f"Invalid solver setting '{where}': {first['msg']}") from e


# ---------------- Outputs -----------------
def emit_rows(rows: Sequence[BaseModel], out: Optional[Path]) -> Optional[str]:
    """Write rows to ``out`` (CSV, or JSON by suffix) or print CSV; returns the printed text."""
    reports = ReportRepository()
    if out is not None:
        reports.write(rows, out)
        return None
    text = reports.to_csv(rows)
    typer.echo(text, nl=False)
    return text


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, bytes):
        return value.hex()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_manifest(
    ctx: typer.Context,
    command: str,
    parameters: Dict[str, Any],
    inputs: Dict[str, Path],
    outputs: Dict[str, Path],
    out: Optional[Path] = None,
    stdout: Optional[str] = None,
    timings: Optional[Dict[str, float]] = None,
) -> Path:
    """Record one run; next to ``out`` when given, otherwise in the manifest directory."""
    settings = state(ctx).settings
    params = {k: _jsonable(v) for k, v in sorted(parameters.items())}
    output_hashes = {name: file_digest(path) for name, path in outputs.items() if Path(path).is_file()}
    if stdout is not None:
        output_hashes["stdout"] = SHA256.new(stdout.encode("utf-8")).hexdigest()
    manifest = RunManifest(
        command=command,
        parameters=params,
        input_hashes={name: file_digest(path) for name, path in inputs.items() if Path(path).is_file()},
        output_hashes=output_hashes,
        tool_version=TOOL_VERSION,
        timings=timings or {},
    )
    if out is not None:
        path = Path(f"{out}.manifest.json")
    else:
        run_id = SHA256.new(json.dumps(params, sort_keys=True).encode("utf-8")).hexdigest()[:12]
        path = Path(settings.manifest_dir) / f"{command}-{run_id}.manifest.json"
    ReportRepository().write_manifest(manifest, path)
    logger.debug("Run manifest written to %s", path)
    return path


def cipher_config(scheme: str, block: Optional[int] = None, layout: str = "h") -> CipherConfig:
    try:
        return CipherConfig(scheme=scheme, block=None if block is None else (block, block), layout=parse_layout(layout))
    except ValidationError as e:
        raise ConfigError(f"Invalid cipher parameters: {e.errors()[0]['msg']}") from e
