"""Jigsaw-puzzle attack on block-scrambled images.

Encrypted blocks are treated as square jigsaw pieces of unknown position,
pose and polarity (and channel order, for the conventional scheme). Pairwise
edge compatibility is the symmetric Mahalanobis Gradient Compatibility, or a
prediction SSD as a cheaper alternative. The solver grows one assembly
greedily from the most compatible pair, always filling the frontier slot
whose best candidate is cheapest, inside a bounding box of the block grid.
"""
import heapq
import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.models.configs import CipherConfig, SolverConfig
from src.cli.schemas.reports import AssemblyScore, AttackReport
from src.core.errors import ConfigError, GridError, ShapeError
from src.core.security import trial_key
from src.models.image import BIT_DEPTH, BlockGrid, Image
from src.models.puzzle import PieceVariant, PuzzleAssembly
from src.models.transform import ALL_POSES, CHANNEL_PERMS, D4Pose, TransformRecord
from src.services.analysis_service import COMPOSE, average_scores, psnr, score_normalised
from src.services.cipher_service import block_pieces, encrypt_image, unscramble_blocks
from src.services.pixel_service import merge_blocks

logger = logging.getLogger(__name__)

UP, RIGHT, DOWN, LEFT = range(4)
SIDE_NAMES = {"up": UP, "right": RIGHT, "down": DOWN, "left": LEFT}
OPPOSITE = (DOWN, LEFT, UP, RIGHT)
OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))
QUARTER_TURN = D4Pose(1, 0)
PRUNED = 1e30


# ---------------- Piece variants -----------------
def _check_square(tiles: np.ndarray) -> None:
    if tiles.shape[-1] != tiles.shape[-2]:
        raise ShapeError(f"Jigsaw pieces must be square, got {tiles.shape[-1]}x{tiles.shape[-2]}")


def _variant_table(cfg: SolverConfig, channels: int) -> np.ndarray:
    """``(V, 3)`` rows of (pose, polarity, channel order); row 0 is the identity."""
    poses = range(len(ALL_POSES)) if cfg.variant_search else (0,)
    polarities = (0, 1) if cfg.variant_search else (0,)
    orders = range(len(CHANNEL_PERMS)) if cfg.channel_search and channels == 3 else (0,)
    return np.array([(p, q, c) for c in orders for q in polarities for p in poses], dtype=np.int64)


def _apply_variant(tiles: np.ndarray, pose: int, polarity: int, order: int) -> np.ndarray:
    """Reorder channels, negate, then pose ``(..., C, B, B)`` tiles."""
    if order:
        tiles = tiles[..., list(CHANNEL_PERMS[order]), :, :]
    if polarity:
        tiles = np.bitwise_xor(tiles, (1 << BIT_DEPTH) - 1)
    return ALL_POSES[pose].apply(tiles)


def _variant_tiles(pieces: np.ndarray, table: np.ndarray) -> np.ndarray:
    """``(n, V, C, B, B)`` float32 tiles, one per row of ``table``."""
    n, channels, size, _ = pieces.shape
    out = np.empty((n, len(table), channels, size, size), dtype=np.float32)
    for v, (pose, polarity, order) in enumerate(table):
        out[:, v] = _apply_variant(pieces, pose, polarity, order)
    return out


def expand_variants(piece_id: int, tile: np.ndarray, with_channels: bool = False) -> List[PieceVariant]:
    """Every pose x polarity hypothesis of one ``(C, B, B)`` tile (x6 channel orders if asked)."""
    _check_square(tile)
    table = _variant_table(SolverConfig(channel_search=with_channels), tile.shape[0])
    return [
        PieceVariant(piece_id, ALL_POSES[pose], int(polarity), _apply_variant(tile, pose, polarity, order), int(order))
        for pose, polarity, order in table
    ]


def polarity_partners(table: np.ndarray) -> Optional[np.ndarray]:
    """Row of the opposite polarity for every row of ``table``; None without polarity search."""
    lookup = {tuple(row): v for v, row in enumerate(table.tolist())}
    partners = np.array([lookup.get((p, 1 - q, c), -1) for p, q, c in table.tolist()], dtype=np.int64)
    return None if (partners < 0).any() else partners


def prune_polarity(costs: np.ndarray, table: np.ndarray, partners: Optional[np.ndarray] = None) -> np.ndarray:
    """Keep the cheaper polarity of every (piece, pose, channel order) on one boundary.

    ``costs`` holds ``n * V`` entries, piece-major. The dearer polarity gets
    ``PRUNED``; a tie keeps the positive one. Pruned hypotheses stay finite so
    a slot whose neighbours disagree on polarity can still be filled.
    """
    if partners is None:
        partners = polarity_partners(table)
        if partners is None:
            return costs
    c = costs.reshape(-1, len(table))
    other = c[:, partners]
    worse = (c > other) | ((c == other) & (table[:, 1] == 1))
    return np.where(worse, PRUNED, c).reshape(costs.shape)


# ---------------- Edge compatibility -----------------
@dataclass(frozen=True)
class SideStats:
    """Boundary statistics of one side for a stack of tiles.

    ``edge`` and ``pred`` are ``(m, B, C)``: the boundary line and its linear
    extrapolation one pixel outward. ``mu``/``sinv`` are the mean and inverse
    (ridged) covariance of the gradients across that boundary.
    """

    edge: np.ndarray
    pred: np.ndarray
    mu: np.ndarray
    sinv: np.ndarray

    def at(self, k: int) -> "SideStats":
        return SideStats(self.edge[k], self.pred[k], self.mu[k], self.sinv[k])


def _strips(tiles: np.ndarray, side: int) -> Tuple[np.ndarray, np.ndarray]:
    inner_index = 1 if tiles.shape[-1] > 1 else 0
    if side == UP:
        edge, inner = tiles[..., 0, :], tiles[..., inner_index, :]
    elif side == DOWN:
        edge, inner = tiles[..., -1, :], tiles[..., -1 - inner_index, :]
    elif side == LEFT:
        edge, inner = tiles[..., :, 0], tiles[..., :, inner_index]
    else:
        edge, inner = tiles[..., :, -1], tiles[..., :, -1 - inner_index]
    # (..., C, B) -> (..., B, C)
    return np.swapaxes(edge, -1, -2).astype(np.float64), np.swapaxes(inner, -1, -2).astype(np.float64)


def side_stats(tiles: np.ndarray, side: int, epsilon: float) -> SideStats:
    """Statistics of ``side`` for ``(m, C, B, B)`` tiles."""
    edge, inner = _strips(tiles, side)
    grad = edge - inner
    mu = grad.mean(axis=1)
    centered = grad - mu[:, None, :]
    dof = max(grad.shape[1] - 1, 1)
    cov = np.einsum("mbc,mbd->mcd", centered, centered) / dof
    cov += epsilon * np.eye(grad.shape[2])
    return SideStats(edge, 2.0 * edge - inner, mu, np.linalg.inv(cov))


def pair_costs(a: SideStats, b: SideStats, method: str = "mgc") -> np.ndarray:
    """Dissimilarity of one placed side ``a`` against candidate sides ``b`` (batched).

    ``a`` holds a single tile's statistics, ``b`` a stack; ``b`` is the side
    facing ``a``. Both directions are summed so the measure is symmetric.
    """
    if method == "ssd":
        forward = b.edge - a.pred
        backward = a.edge - b.pred
        return (forward * forward).sum(axis=(1, 2)) + (backward * backward).sum(axis=(1, 2))
    if method != "mgc":
        raise ConfigError(f"Unknown compatibility measure '{method}'")
    forward = (b.edge - a.edge) - a.mu
    backward = (a.edge - b.edge) - b.mu[:, None, :]
    d_ab = np.einsum("mbc,cd,mbd->m", forward, a.sinv, forward)
    d_ba = np.einsum("mbc,mcd,mbd->m", backward, b.sinv, backward)
    return d_ab + d_ba


def compatibility(a: PieceVariant, b: PieceVariant, side: str = "right", method: str = "mgc", epsilon: float = 1.0) -> float:
    """Dissimilarity of placing ``b`` on ``side`` of ``a``; lower is better."""
    if side not in SIDE_NAMES:
        raise ConfigError(f"Unknown side '{side}' (expected one of {', '.join(SIDE_NAMES)})")
    _check_square(a.pixels)
    _check_square(b.pixels)
    if a.pixels.shape != b.pixels.shape:
        raise ShapeError(f"Pieces of shape {a.pixels.shape} and {b.pixels.shape} cannot be neighbours")
    s = SIDE_NAMES[side]
    stats_a = side_stats(a.pixels[np.newaxis], s, epsilon).at(0)
    stats_b = side_stats(b.pixels[np.newaxis], OPPOSITE[s], epsilon)
    return float(pair_costs(stats_a, stats_b, method)[0])


# ---------------- Greedy placement solver -----------------
class JigsawSolver:
    """Greedy frontier-growth solver over all pieces and their variants.

    Placed pieces live on an unbounded integer lattice; a slot is a candidate
    as long as the bounding box of the assembly would still fit the block
    grid (either orientation when poses are searched, since a transposed
    assembly is one quarter turn away).
    """

    def __init__(self, pieces: np.ndarray, cols: int, rows: int, cfg: SolverConfig):
        pieces = np.asarray(pieces)
        if pieces.ndim != 4:
            raise ShapeError(f"Pieces must be an (n, C, B, B) array, got shape {pieces.shape}")
        _check_square(pieces)
        if cols < 1 or rows < 1 or len(pieces) != cols * rows:
            raise GridError(f"{len(pieces)} pieces cannot fill a {cols}x{rows} grid")
        self.cfg = cfg
        self.cols, self.rows = cols, rows
        self.n = len(pieces)
        self.table = _variant_table(cfg, pieces.shape[1])
        self.v = len(self.table)
        self._partners = polarity_partners(self.table) if cfg.prune_polarity else None
        flat = _variant_tiles(pieces, self.table).reshape((self.n * self.v,) + pieces.shape[1:])
        self._stats = [side_stats(flat, side, cfg.epsilon) for side in range(4)]
        rng = np.random.default_rng(cfg.seed)
        priority = rng.permutation(self.n)
        self._tiebreak = (priority[:, None] * self.v + np.arange(self.v)).ravel()
        self._priority_order = np.argsort(priority)
        self.elapsed = 0.0
        logger.debug("Solver ready: %d pieces x %d variants (%s)", self.n, self.v, cfg.compatibility)

    # -- costs --
    def costs_against(self, k: int, side: int) -> np.ndarray:
        """Cost of every (piece, variant) placed on ``side`` of placed variant ``k``."""
        costs = pair_costs(self._stats[side].at(k), self._stats[OPPOSITE[side]], self.cfg.compatibility)
        if self._partners is None:
            return costs
        return prune_polarity(costs, self.table, self._partners)

    def _pick(self, costs: np.ndarray, taken: np.ndarray) -> Optional[Tuple[float, int]]:
        masked = np.where(np.repeat(taken, self.v), np.inf, costs)
        best = masked.min()
        if not np.isfinite(best):
            return None
        ties = np.flatnonzero(masked == best)
        k = int(ties[np.argmin(self._tiebreak[ties])])
        return float(best), k

    # -- geometry --
    def _fits(self, height: int, width: int) -> bool:
        if height <= self.rows and width <= self.cols:
            return True
        return self.cfg.variant_search and height <= self.cols and width <= self.rows

    def _fits_with(self, box: Tuple[int, int, int, int], slot: Tuple[int, int]) -> bool:
        top, bottom, left, right = box
        r, c = slot
        return self._fits(max(bottom, r) - min(top, r) + 1, max(right, c) - min(left, c) + 1)

    # -- search --
    def _seed_pair(self, deadline: float) -> Optional[Tuple[int, int, int]]:
        """``(i, side, k)``: piece ``i`` as-is with variant ``k`` on ``side`` of it."""
        sides = [s for s in range(4) if self._fits(*((2, 1) if s in (UP, DOWN) else (1, 2)))]
        best = None
        for i in range(self.n):
            own = np.zeros(self.n, dtype=bool)
            own[i] = True
            for side in sides:
                picked = self._pick(self.costs_against(i * self.v, side), own)
                if picked is None:
                    continue
                rank = (picked[0], self._tiebreak[i * self.v], side)
                if best is None or rank < best[0]:
                    best = (rank, (i, side, picked[1]))
            if time.monotonic() > deadline:
                logger.warning("Time budget ran out while choosing the seed pair")
                break
        return None if best is None else best[1]

    def solve(self) -> PuzzleAssembly:
        start = time.monotonic()
        deadline = start + self.cfg.time_budget
        grid: Dict[Tuple[int, int], int] = {}
        taken = np.zeros(self.n, dtype=bool)
        box = [0, 0, 0, 0]
        sums: Dict[Tuple[int, int], np.ndarray] = {}
        counts: Dict[Tuple[int, int], int] = {}
        version: Dict[Tuple[int, int], int] = {}
        heap: list = []

        def push(slot: Tuple[int, int]) -> None:
            picked = self._pick(sums[slot] / counts[slot], taken)
            if picked is not None:
                cost, k = picked
                heapq.heappush(heap, (cost, -counts[slot], int(self._tiebreak[k]), slot, version[slot], k))

        def place(slot: Tuple[int, int], k: int) -> None:
            grid[slot] = k
            taken[k // self.v] = True
            sums.pop(slot, None)
            r, c = slot
            box[:] = [min(box[0], r), max(box[1], r), min(box[2], c), max(box[3], c)]
            for side, (dr, dc) in enumerate(OFFSETS):
                neighbour = (r + dr, c + dc)
                if neighbour in grid or not self._fits_with(tuple(box), neighbour):
                    continue
                costs = self.costs_against(k, side).astype(np.float32)
                if neighbour in sums:
                    sums[neighbour] += costs
                else:
                    sums[neighbour] = costs
                counts[neighbour] = counts.get(neighbour, 0) + 1
                version[neighbour] = version.get(neighbour, 0) + 1
                push(neighbour)

        seed = self._seed_pair(deadline) if self.n > 1 else None
        box[:] = [0, 0, 0, 0]
        if seed is None:
            place((0, 0), self._priority_order[0] * self.v)
        else:
            i, side, k = seed
            place((0, 0), i * self.v)
            if not taken[k // self.v]:
                place(OFFSETS[side], k)

        while len(grid) < self.n and heap:
            if time.monotonic() > deadline:
                logger.warning("Time budget of %.0fs ran out with %d/%d pieces placed", self.cfg.time_budget, len(grid), self.n)
                break
            _, _, _, slot, ver, k = heapq.heappop(heap)
            if slot in grid or version.get(slot) != ver or not self._fits_with(tuple(box), slot):
                continue
            if taken[k // self.v]:
                push(slot)
                continue
            place(slot, k)

        assembly = self._finish(grid, taken, tuple(box))
        self.elapsed = time.monotonic() - start
        logger.info("Solved %d pieces in %.2fs", self.n, self.elapsed)
        return assembly

    def _finish(self, grid: Dict[Tuple[int, int], int], taken: np.ndarray, box: Tuple[int, int, int, int]) -> PuzzleAssembly:
        top, bottom, left, _ = box
        height = bottom - top + 1
        width = box[3] - left + 1
        if height <= self.rows and width <= self.cols:
            box_h, box_w = self.rows, self.cols
        else:
            box_h, box_w = self.cols, self.rows

        # Leftovers go in unposed, in priority order.
        leftovers = iter(j for j in self._priority_order if not taken[j])
        for r in range(top, top + box_h):
            for c in range(left, left + box_w):
                if (r, c) not in grid:
                    grid[(r, c)] = int(next(leftovers)) * self.v

        positions = np.empty(self.n, dtype=np.int64)
        poses = np.empty(self.n, dtype=np.int64)
        polarity = np.empty(self.n, dtype=np.int64)
        orders = np.empty(self.n, dtype=np.int64)
        transposed = (box_h, box_w) != (self.rows, self.cols)
        for (r, c), k in grid.items():
            piece, variant = divmod(k, self.v)
            pose, polarity[piece], orders[piece] = self.table[variant]
            lr, lc = r - top, c - left
            if transposed:
                lr, lc = lc, box_h - 1 - lr
                pose = COMPOSE[QUARTER_TURN.index, pose]
            positions[piece] = lr * self.cols + lc
            poses[piece] = pose
        return PuzzleAssembly(
            positions=positions,
            poses=poses,
            polarity=polarity,
            cols=self.cols,
            rows=self.rows,
            channel_perm=orders if self.cfg.channel_search and self.table[:, 2].any() else None,
        )


def solve(pieces: np.ndarray, cols: int, rows: int, cfg: Optional[SolverConfig] = None) -> PuzzleAssembly:
    return JigsawSolver(pieces, cols, rows, cfg or SolverConfig()).solve()


# ---------------- Rendering -----------------
def render_assembly(pieces: np.ndarray, asm: PuzzleAssembly) -> Image:
    """Paint every piece, in its chosen variant, into its slot."""
    pieces = np.asarray(pieces)
    _check_square(pieces)
    if len(pieces) != asm.n:
        raise GridError(f"{len(pieces)} pieces for a {asm.cols}x{asm.rows} assembly")
    _, channels, size, _ = pieces.shape
    blocks = np.empty_like(pieces)
    orders = asm.channel_perms()
    for j in range(asm.n):
        blocks[asm.positions[j]] = _apply_variant(pieces[j], asm.poses[j], asm.polarity[j], orders[j])
    canvas = np.zeros((channels, asm.rows * size, asm.cols * size), dtype=np.uint8)
    grid = BlockGrid(size, size, asm.cols, asm.rows, blocks, canvas)
    return merge_blocks(grid)


def reference_image(pieces: np.ndarray, truth: TransformRecord) -> Image:
    """The unscrambled block plane the attacker is trying to rebuild."""
    pieces = np.asarray(pieces)
    _, channels, size, _ = pieces.shape
    canvas = np.zeros((channels, truth.rows * size, truth.cols * size), dtype=np.uint8)
    grid = BlockGrid(size, size, truth.cols, truth.rows, unscramble_blocks(pieces, truth), canvas)
    return merge_blocks(grid)


# ---------------- Evaluation -----------------
@dataclass(frozen=True)
class AttackOutcome:
    score: AssemblyScore
    assembly: PuzzleAssembly
    truth: TransformRecord
    psnr_db: float
    solve_seconds: float
    trials: int = 1


def attack_pieces(pieces: np.ndarray, truth: TransformRecord, cfg: SolverConfig) -> AttackOutcome:
    """Solve one encrypted puzzle with known ground truth and score it."""
    solver = JigsawSolver(pieces, truth.cols, truth.rows, cfg)
    assembly = solver.solve()
    score = score_normalised(assembly, truth)
    quality = psnr(render_assembly(pieces, assembly), reference_image(pieces, truth))
    return AttackOutcome(score, assembly, truth, quality, solver.elapsed)


def evaluate_attack(
    image: Image,
    cipher_cfg: CipherConfig,
    solver_cfg: SolverConfig,
    trials: int = 1,
    seed: bytes = b"attack",
) -> AttackOutcome:
    """Best-of-``trials`` attack over independently keyed encryptions of ``image``."""
    if trials < 1:
        raise ConfigError(f"At least one trial is needed, got {trials}")
    best: Optional[AttackOutcome] = None
    total_seconds = 0.0
    for t in range(trials):
        enc, truth = encrypt_image(image, trial_key(seed, t), cipher_cfg)
        pieces, _, _ = block_pieces(enc, cipher_cfg)
        cfg = solver_cfg.model_copy(update={"seed": solver_cfg.seed + t})
        outcome = attack_pieces(pieces, truth, cfg)
        total_seconds += outcome.solve_seconds
        logger.debug("Trial %d: Dc=%.3f Nc=%.3f Lc=%.3f", t, outcome.score.dc, outcome.score.nc, outcome.score.lc)
        if best is None or outcome.score.total > best.score.total:
            best = outcome
    return AttackOutcome(best.score, best.assembly, best.truth, best.psnr_db, total_seconds, trials)


def evaluate_corpus(
    images: Sequence[Image],
    cipher_cfg: CipherConfig,
    solver_cfg: SolverConfig,
    trials: int = 1,
    seed: bytes = b"attack",
    image_ids: Optional[Sequence[str]] = None,
) -> Tuple[List[AttackReport], AssemblyScore]:
    """Per-image attack reports plus the corpus-average score.

    Image ``i`` is keyed from ``seed`` extended by ``i``, so results do not
    depend on how the corpus is split across runs.
    """
    if image_ids is None:
        image_ids = [f"image-{i:03d}" for i in range(len(images))]
    if len(images) != len(image_ids):
        raise ConfigError(f"{len(images)} images but {len(image_ids)} identifiers")
    if not images:
        raise ConfigError("Cannot evaluate an empty corpus")
    reports: List[AttackReport] = []
    scores: List[AssemblyScore] = []
    for index, (img, image_id) in enumerate(zip(images, image_ids)):
        outcome = evaluate_attack(img, cipher_cfg, solver_cfg, trials, seed + index.to_bytes(4, "big"))
        scores.append(outcome.score)
        reports.append(
            AttackReport(
                image_id=image_id,
                scheme=cipher_cfg.scheme,
                block=cipher_cfg.block_size[0],
                dc=outcome.score.dc,
                nc=outcome.score.nc,
                lc=outcome.score.lc,
                psnr_db=outcome.psnr_db,
                trials=trials,
                solve_seconds=outcome.solve_seconds,
            )
        )
        logger.info("%s: Dc=%.3f Nc=%.3f Lc=%.3f", image_id, outcome.score.dc, outcome.score.nc, outcome.score.lc)
    return reports, average_scores(scores)
