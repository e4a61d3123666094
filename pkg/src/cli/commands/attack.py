"""Jigsaw-puzzle attack: one encrypted image, or a whole corpus."""
import logging
from pathlib import Path
from typing import Optional

import typer

from src.cli.deps import cipher_config, emit_rows, handle_errors, parse_seed, solver_config, state, write_manifest
from src.models.configs import CipherConfig
from src.cli.schemas.reports import AttackReport
from src.core.errors import GridError
from src.repositories.image_repo import ImageRepository
from src.repositories.key_repo import KeyRepository
from src.services.attack_service import attack_pieces, evaluate_corpus, render_assembly
from src.services.cipher_service import block_pieces

logger = logging.getLogger(__name__)

COMPATIBILITY_HELP = "Edge compatibility measure: mgc or ssd"


@handle_errors
def attack(
    ctx: typer.Context,
    enc_img: Path = typer.Argument(..., help="Encrypted image"),
    truth_json: Path = typer.Argument(..., help="Transform record written by encrypt --truth"),
    compatibility: Optional[str] = typer.Option(None, help=COMPATIBILITY_HELP),
    variant_search: Optional[bool] = typer.Option(None, "--variant-search/--no-variant-search"),
    channel_search: Optional[bool] = typer.Option(None, "--channel-search/--no-channel-search"),
    solver_seed: Optional[int] = typer.Option(None, help="Tie-break seed of the solver"),
    time_budget: Optional[float] = typer.Option(None, help="Solver time budget in seconds"),
    preview: Optional[Path] = typer.Option(None, help="Write the assembled image (lossless)"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV/JSON score report (stdout when omitted)"),
):
    """Reassemble an encrypted image as a jigsaw puzzle and score it against the truth record."""
    settings = state(ctx).settings
    truth = KeyRepository().load_truth(truth_json)
    record = truth.record()
    cfg = CipherConfig(scheme=truth.scheme, block=(truth.block, truth.block))
    images = ImageRepository()
    pieces, cols, rows = block_pieces(images.load(enc_img), cfg)
    if (cols, rows) != (record.cols, record.rows):
        raise GridError(f"Encrypted image has a {cols}x{rows} block grid, the truth record {record.cols}x{record.rows}")
    solver = solver_config(
        settings,
        compatibility=compatibility,
        variant_search=variant_search,
        channel_search=channel_search,
        seed=solver_seed,
        time_budget=time_budget,
    )
    outcome = attack_pieces(pieces, record, solver)
    report = AttackReport(
        image_id=enc_img.stem,
        scheme=truth.scheme,
        block=truth.block,
        dc=outcome.score.dc,
        nc=outcome.score.nc,
        lc=outcome.score.lc,
        psnr_db=outcome.psnr_db,
        solve_seconds=outcome.solve_seconds,
    )
    printed = emit_rows([report], out)
    outputs = {"report": out} if out is not None else {}
    if preview is not None:
        images.save(render_assembly(pieces, outcome.assembly), preview)
        outputs["preview"] = preview
    write_manifest(
        ctx,
        "attack",
        solver.model_dump(exclude={"time_budget"}),
        inputs={"image": enc_img, "truth": truth_json},
        outputs=outputs,
        out=out,
        stdout=printed,
        timings={"solve_seconds": outcome.solve_seconds},
    )


@handle_errors
def evaluate(
    ctx: typer.Context,
    corpus_dir: Path = typer.Argument(..., help="Directory of original images"),
    scheme: str = typer.Option("grayscale", help="conventional, grayscale or luminance"),
    block: Optional[int] = typer.Option(None, help="Block size (scheme default when omitted)"),
    trials: int = typer.Option(1, help="Independently keyed encryptions per image; the best is kept"),
    seed: str = typer.Option("61747461636b", help="Hex seed for the per-trial keys"),
    compatibility: Optional[str] = typer.Option(None, help=COMPATIBILITY_HELP),
    variant_search: Optional[bool] = typer.Option(None, "--variant-search/--no-variant-search"),
    channel_search: Optional[bool] = typer.Option(None, "--channel-search/--no-channel-search"),
    time_budget: Optional[float] = typer.Option(None, help="Solver time budget in seconds per trial"),
    out: Path = typer.Option(..., "--out", help="CSV/JSON table of per-image scores"),
):
    """Best-of-trials attack scores for every image of a corpus."""
    settings = state(ctx).settings
    cipher = cipher_config(scheme, block)
    solver = solver_config(
        settings,
        compatibility=compatibility,
        variant_search=variant_search,
        channel_search=channel_search,
        time_budget=time_budget,
    )
    images = ImageRepository()
    paths = images.corpus(corpus_dir)
    corpus = [images.load(p) for p in paths]
    reports, mean = evaluate_corpus(corpus, cipher, solver, trials, parse_seed(seed), [p.stem for p in paths])
    emit_rows(reports, out)
    logger.info("Corpus mean over %d image(s): Dc=%.3f Nc=%.3f Lc=%.3f", len(reports), mean.dc, mean.nc, mean.lc)
    write_manifest(
        ctx,
        "evaluate",
        {"scheme": scheme, "block": cipher.block_size[0], "trials": trials, "key_seed": seed,
         **solver.model_dump(exclude={"time_budget"})},
        inputs={p.name: p for p in paths},
        outputs={"report": out},
        out=out,
        timings={r.image_id: r.solve_seconds for r in reports},
    )
