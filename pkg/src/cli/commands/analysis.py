"""Key-space, scheme comparison and rate-distortion reports."""
import logging
from pathlib import Path
from typing import Optional

import typer

from src.cli.deps import emit_rows, handle_errors, parse_int_list, parse_seed, state, write_manifest
from src.core.errors import ConfigError
from src.repositories.image_repo import ImageRepository
from src.services.analysis_service import block_count, keyspace_report, scheme_properties
from src.services.rd_service import RD_SCHEMES, plot_rd_curves, rd_curve

logger = logging.getLogger(__name__)


@handle_errors
def keyspace(
    ctx: typer.Context,
    x: int = typer.Argument(..., help="Image width"),
    y: int = typer.Argument(..., help="Image height"),
    bx: int = typer.Argument(..., help="Block width"),
    by: Optional[int] = typer.Argument(None, help="Block height (defaults to the width)"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Block count and key-space sizes of both schemes for an X x Y image."""
    by = bx if by is None else by
    report = keyspace_report(block_count(x, y, bx, by))
    printed = emit_rows([report], out)
    write_manifest(
        ctx, "keyspace", {"x": x, "y": y, "bx": bx, "by": by}, inputs={},
        outputs={"report": out} if out is not None else {}, out=out, stdout=printed,
    )


@handle_errors
def properties(
    ctx: typer.Context,
    x: int = typer.Argument(..., help="Image width"),
    y: int = typer.Argument(..., help="Image height"),
    conventional_block: int = typer.Option(16, help="Block size of the conventional scheme"),
    proposed_block: int = typer.Option(8, help="Block size of the grayscale-based scheme"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Side-by-side properties of the conventional and grayscale-based schemes."""
    rows = scheme_properties(
        x, y, (conventional_block, conventional_block), (proposed_block, proposed_block)
    )
    printed = emit_rows(rows, out)
    write_manifest(
        ctx,
        "properties",
        {"x": x, "y": y, "conventional_block": conventional_block, "proposed_block": proposed_block},
        inputs={},
        outputs={"report": out} if out is not None else {},
        out=out,
        stdout=printed,
    )


@handle_errors
def rd(
    ctx: typer.Context,
    corpus_dir: Path = typer.Argument(..., help="Directory of original images"),
    schemes: str = typer.Option(",".join(RD_SCHEMES), help="Comma-separated RD schemes"),
    qf: str = typer.Option("50,60,70,80,90,95", "--qf", help="Comma-separated quality factors"),
    seed: str = typer.Option("7264", help="Hex seed for the per-image keys"),
    out: Path = typer.Option(..., "--out", help="CSV/JSON table of RD points"),
    plot: Optional[Path] = typer.Option(None, help="PNG plot of the curves"),
):
    """Rate-distortion curves (bpp vs PSNR) averaged over a corpus."""
    settings = state(ctx).settings
    names = [s.strip() for s in schemes.split(",") if s.strip()]
    unknown = [s for s in names if s not in RD_SCHEMES]
    if unknown or not names:
        raise ConfigError(f"Unknown RD scheme(s) {', '.join(unknown) or '(none given)'}; known: {', '.join(RD_SCHEMES)}")
    qualities = parse_int_list(qf, "--qf")
    images = ImageRepository()
    paths = images.corpus(corpus_dir)
    corpus = [images.load(p) for p in paths]
    logger.info("RD curves over %d image(s), %d scheme(s)", len(corpus), len(names))

    curves = {name: rd_curve(corpus, name, qualities, parse_seed(seed), settings.workers) for name in names}
    emit_rows([point for name in names for point in curves[name]], out)
    outputs = {"report": out}
    if plot is not None:
        plot_rd_curves(curves, plot)
        outputs["plot"] = plot
    write_manifest(
        ctx,
        "rd",
        {"schemes": names, "qf": qualities, "seed": seed},
        inputs={p.name: p for p in paths},
        outputs=outputs,
        out=out,
    )
