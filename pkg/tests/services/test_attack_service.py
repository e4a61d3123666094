"""Tests for the jigsaw-puzzle attack."""

import math

import numpy as np
import pytest

from src.models.configs import CipherConfig, SolverConfig
from src.core.errors import ConfigError, GridError, ShapeError
from src.models.puzzle import PieceVariant, PuzzleAssembly
from src.models.transform import D4Pose, TransformRecord
from src.services.analysis_service import score_assembly
from src.services.attack_service import (
    PRUNED,
    JigsawSolver,
    attack_pieces,
    compatibility,
    evaluate_attack,
    evaluate_corpus,
    expand_variants,
    prune_polarity,
    reference_image,
    render_assembly,
    solve,
)
from src.services.cipher_service import scramble_blocks
from src.services.pixel_service import split_blocks

# ----------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------

def _blocks(img, size):
    grid = split_blocks(img, size, size)
    return np.array(grid.blocks), grid.cols, grid.rows


def _piece(blocks, index):
    return PieceVariant(index, D4Pose(), 0, blocks[index])


def _shuffled(img, size, seed):
    """Permutation-only scramble of ``img`` with its ground truth."""
    blocks, cols, rows = _blocks(img, size)
    n = cols * rows
    truth = TransformRecord(np.random.default_rng(seed).permutation(n), np.zeros(n), np.zeros(n), cols, rows)
    return scramble_blocks(blocks, truth), truth


FAST = SolverConfig(variant_search=False, time_budget=60.0)

# ----------------------------------------------------------------------
# Tests
# ----------------------------------------------------------------------

def test_variant_counts(rgb_image):
    blocks, _, _ = _blocks(rgb_image, 16)
    variants = expand_variants(0, blocks[0])
    assert len(variants) == 16
    assert len({(v.pose, v.polarity) for v in variants}) == 16
    assert len(expand_variants(0, blocks[0], with_channels=True)) == 96


def test_identity_variant_is_the_tile(rgb_image):
    blocks, _, _ = _blocks(rgb_image, 16)
    first = expand_variants(3, blocks[3])[0]
    assert first.pose == D4Pose() and first.polarity == 0
    assert np.array_equal(first.pixels, blocks[3])


def test_non_square_pieces_are_rejected():
    with pytest.raises(ShapeError):
        expand_variants(0, np.zeros((1, 8, 16), dtype=np.uint8))


def test_compatibility_is_symmetric(rgb_image):
    blocks, cols, _ = _blocks(rgb_image, 16)
    a, b = _piece(blocks, 0), _piece(blocks, 1)
    assert compatibility(a, b, "right") == pytest.approx(compatibility(b, a, "left"), rel=1e-5)
    c = _piece(blocks, cols)
    assert compatibility(a, c, "down") == pytest.approx(compatibility(c, a, "up"), rel=1e-5)


@pytest.mark.parametrize("method", ["mgc", "ssd"])
def test_true_neighbour_scores_best(make_image, method):
    img = make_image(128, 96, seed=4)
    blocks, cols, _ = _blocks(img, 16)
    a = _piece(blocks, cols + 2)
    true_right = compatibility(a, _piece(blocks, cols + 3), "right", method)
    wrong_right = compatibility(a, _piece(blocks, 5 * cols + 7), "right", method)
    assert true_right < wrong_right


def test_unknown_side_or_method(rgb_image):
    blocks, _, _ = _blocks(rgb_image, 16)
    a, b = _piece(blocks, 0), _piece(blocks, 1)
    with pytest.raises(ConfigError):
        compatibility(a, b, "diagonal")
    with pytest.raises(ConfigError):
        compatibility(a, b, "right", method="ncc")


def test_solver_rejects_bad_grids(rgb_image):
    blocks, cols, rows = _blocks(rgb_image, 16)
    with pytest.raises(GridError):
        JigsawSolver(blocks, cols + 1, rows, FAST)
    with pytest.raises(ShapeError):
        JigsawSolver(blocks[0], cols, rows, FAST)


def test_permutation_only_puzzle_is_mostly_solved(make_image):
    img = make_image(256, 192, seed=11)
    pieces, truth = _shuffled(img, 32, seed=3)
    asm = solve(pieces, truth.cols, truth.rows, FAST)
    assert asm.dims == (truth.cols, truth.rows)
    assert sorted(asm.positions.tolist()) == list(range(truth.n))
    assert score_assembly(asm, truth).nc >= 0.4


def test_solver_is_deterministic(make_image):
    img = make_image(128, 96, seed=6)
    pieces, truth = _shuffled(img, 16, seed=9)
    a = solve(pieces, truth.cols, truth.rows, FAST)
    b = solve(pieces, truth.cols, truth.rows, FAST)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.poses, b.poses)


def test_variant_search_returns_valid_assembly(make_image):
    img = make_image(96, 64, seed=2)
    pieces, truth = _shuffled(img, 16, seed=1)
    asm = solve(pieces, truth.cols, truth.rows, SolverConfig(time_budget=60.0))
    assert sorted(asm.positions.tolist()) == list(range(truth.n))
    assert set(asm.poses.tolist()) <= set(range(8))
    assert set(asm.polarity.tolist()) <= {0, 1}


def test_pruning_keeps_one_polarity_per_pose(make_image):
    pieces, truth = _shuffled(make_image(64, 48, seed=3), 16, seed=4)
    solver = JigsawSolver(pieces, truth.cols, truth.rows, SolverConfig(prune_polarity=False))
    costs = np.random.default_rng(0).random(solver.n * solver.v)
    pruned = prune_polarity(costs, solver.table)
    # rows of the table: 8 poses of the positive polarity, then 8 of the negative
    kept = (pruned < PRUNED).reshape(solver.n, 2, 8)
    assert (kept.sum(axis=1) == 1).all()
    best = np.where(pruned < PRUNED, pruned, np.inf).reshape(solver.n, 2, 8).min(axis=1)
    assert np.array_equal(best, costs.reshape(solver.n, 2, 8).min(axis=1))


def test_pruning_is_a_no_op_without_variant_search(make_image):
    pieces, truth = _shuffled(make_image(64, 48, seed=3), 16, seed=4)
    solver = JigsawSolver(pieces, truth.cols, truth.rows, FAST)
    costs = np.arange(solver.n, dtype=np.float64)
    assert prune_polarity(costs, solver.table) is costs


def test_pruned_and_full_search_agree_on_a_strip(make_image):
    # A strip grows one boundary at a time, where pruning never hides the cheapest hypothesis.
    blocks, cols, rows = _blocks(make_image(96, 16, seed=8), 16)
    n = cols * rows
    rng = np.random.default_rng(5)
    truth = TransformRecord(rng.permutation(n), rng.integers(0, 8, n), rng.integers(0, 2, n), cols, rows)
    pieces = scramble_blocks(blocks, truth)
    pruned = solve(pieces, cols, rows, SolverConfig(time_budget=60.0))
    full = solve(pieces, cols, rows, SolverConfig(time_budget=60.0, prune_polarity=False))
    assert np.array_equal(pruned.positions, full.positions)
    assert np.array_equal(pruned.poses, full.poses)
    assert np.array_equal(pruned.polarity, full.polarity)


def test_pruned_solver_handles_a_posed_puzzle(make_image):
    blocks, cols, rows = _blocks(make_image(64, 64, seed=9), 16)
    n = cols * rows
    rng = np.random.default_rng(6)
    truth = TransformRecord(rng.permutation(n), rng.integers(0, 8, n), rng.integers(0, 2, n), cols, rows)
    pruned = solve(scramble_blocks(blocks, truth), cols, rows, SolverConfig(time_budget=60.0))
    assert sorted(pruned.positions.tolist()) == list(range(n))
    assert set(pruned.polarity.tolist()) <= {0, 1}


def test_render_of_truth_is_reference(make_image):
    img = make_image(64, 48, seed=5)
    blocks, cols, rows = _blocks(img, 16)
    truth = TransformRecord.identity(cols, rows)
    assert np.array_equal(render_assembly(blocks, PuzzleAssembly.identity(cols, rows)).planes, img.planes)
    assert np.array_equal(reference_image(blocks, truth).planes, img.planes)


def test_attack_pieces_scores_and_times(make_image):
    img = make_image(128, 96, seed=7)
    pieces, truth = _shuffled(img, 32, seed=2)
    outcome = attack_pieces(pieces, truth, FAST)
    assert 0.0 <= outcome.score.dc <= 1.0
    assert outcome.solve_seconds >= 0.0
    assert outcome.psnr_db > 0.0 or math.isinf(outcome.psnr_db)


def test_evaluate_attack_keeps_best_trial(make_image):
    img = make_image(64, 64, seed=1)
    cfg = CipherConfig(scheme="conventional", block=(16, 16))
    outcome = evaluate_attack(img, cfg, SolverConfig(time_budget=30.0), trials=2, seed=b"unit")
    assert outcome.trials == 2
    assert outcome.assembly.dims == (4, 4)
    with pytest.raises(ConfigError):
        evaluate_attack(img, cfg, FAST, trials=0)


def test_evaluate_corpus_reports(make_image):
    corpus = [make_image(64, 32, seed=s) for s in range(2)]
    cfg = CipherConfig(scheme="grayscale", block=(16, 16))
    reports, mean = evaluate_corpus(corpus, cfg, SolverConfig(time_budget=30.0), image_ids=["a", "b"])
    assert [r.image_id for r in reports] == ["a", "b"]
    assert all(r.scheme == "grayscale" and r.block == 16 for r in reports)
    assert mean.dc == pytest.approx(sum(r.dc for r in reports) / 2)
    assert "solve_seconds" not in reports[0].model_dump()
    with pytest.raises(ConfigError):
        evaluate_corpus([], cfg, FAST)


# ----------------------------------------------------------------------
# Corpus-level attacks: 5 images of 256x192, best of 5 trials each
# ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def corpus_score(desk_corpus):
    cache = {}

    def run(scheme, block):
        if (scheme, block) not in cache:
            cipher = CipherConfig(scheme=scheme, block=(block, block))
            solver = SolverConfig(channel_search=scheme == "conventional", time_budget=60.0)
            _, cache[scheme, block] = evaluate_corpus(desk_corpus, cipher, solver, trials=5, seed=b"table")
        return cache[scheme, block]

    return run


@pytest.mark.slow
def test_conventional_large_blocks_are_assembled(corpus_score):
    assert corpus_score("conventional", 32).nc >= 0.3


@pytest.mark.slow
def test_grayscale_small_blocks_resist_assembly(corpus_score):
    score = corpus_score("grayscale", 8)
    assert score.lc <= 0.05
    assert score.nc <= 0.05


@pytest.mark.slow
def test_largest_component_shrinks_with_the_block(corpus_score):
    lc = [corpus_score("grayscale", block).lc for block in (32, 16, 8)]
    assert lc[0] >= lc[1] >= lc[2]


@pytest.mark.slow
def test_one_channel_is_harder_than_three(corpus_score):
    assert corpus_score("luminance", 16).nc <= corpus_score("conventional", 16).nc
