"""Key-space arithmetic, PSNR and jigsaw reassembly scores.

Key spaces are exact integers. Reassembly scores are strict: a piece only
counts as correct when the assembly also undoes its pose and its
negative-positive transform.
"""
import logging
import math
from typing import Iterable, List, Tuple

import networkx as nx
import numpy as np

from src.cli.schemas.reports import AssemblyScore, KeySpaceReport, SchemeProperties
from src.core.errors import ConfigError, DimensionError
from src.models.image import MAX_SAMPLE, Image
from src.models.puzzle import PuzzleAssembly
from src.models.transform import ALL_POSES, D4Pose, TransformRecord

logger = logging.getLogger(__name__)

# COMPOSE[a, b] = index of (pose a applied after pose b)
COMPOSE = np.array([[a.compose(b).index for b in ALL_POSES] for a in ALL_POSES], dtype=np.int64)

# Global ambiguities that keep the grid dimensions: identity, mirror, flip, half turn.
FRAMES: Tuple[D4Pose, ...] = (D4Pose(0, 0), D4Pose(0, 1), D4Pose.flip_v(), D4Pose(2, 0))


# ---------------- Key spaces -----------------
def block_count(x: int, y: int, bx: int, by: int) -> int:
    if min(x, y, bx, by) < 1:
        raise ConfigError(f"Dimensions must be positive, got image {x}x{y}, block {bx}x{by}")
    return (x // bx) * (y // by)


def boundary_count(u: int, v: int) -> int:
    """Internal boundaries of a ``u x v`` grid."""
    return 2 * u * v - u - v


def log2_exact(value: int) -> float:
    """log2 of an arbitrarily large positive integer, to 3 decimals."""
    if value < 1:
        raise ValueError(f"log2 needs a positive integer, got {value}")
    return round(math.log2(value), 3)


def keyspace_conventional(n: int) -> int:
    """n! * 8^n * 2^n * 6^n."""
    return math.factorial(n) * 8 ** n * 2 ** n * 6 ** n


def keyspace_proposed(n: int) -> int:
    """(3n)! * 8^(3n) * 2^(3n), with ``n`` counted on the original image."""
    return math.factorial(3 * n) * 8 ** (3 * n) * 2 ** (3 * n)


def keyspace_report(n: int) -> KeySpaceReport:
    if n < 0:
        raise ConfigError(f"Block count must be non-negative, got {n}")
    n_a = keyspace_conventional(n)
    n_b = keyspace_proposed(n)
    return KeySpaceReport(
        n=n,
        n_s=math.factorial(n),
        n_ri=8 ** n,
        n_n=2 ** n,
        n_c=6 ** n,
        n_a=n_a,
        n_b=n_b,
        log2_n_a=log2_exact(n_a),
        log2_n_b=log2_exact(n_b),
    )


def scheme_properties(
    x: int,
    y: int,
    conventional_block: Tuple[int, int] = (16, 16),
    proposed_block: Tuple[int, int] = (8, 8),
) -> List[SchemeProperties]:
    """Side-by-side properties of the two schemes for an ``x`` by ``y`` image."""
    n_conv = block_count(x, y, *conventional_block)
    n_prop = block_count(x, y, *proposed_block)
    return [
        SchemeProperties(
            scheme="conventional",
            color_channel="RGB",
            minimum_block=conventional_block,
            encrypted_width=x,
            encrypted_height=y,
            blocks=n_conv,
            keyspace_log2=log2_exact(keyspace_conventional(n_conv)),
            chroma_subsampling="affected",
        ),
        SchemeProperties(
            scheme="grayscale",
            color_channel="grayscale",
            minimum_block=proposed_block,
            encrypted_width=3 * x,
            encrypted_height=y,
            blocks=3 * n_prop,
            keyspace_log2=log2_exact(keyspace_proposed(n_prop)),
            chroma_subsampling="unaffected",
        ),
    ]


# ---------------- Image quality -----------------
def psnr(a: Image, b: Image) -> float:
    """PSNR in dB over all samples of all channels; ``inf`` for identical images."""
    if a.shape != b.shape:
        raise DimensionError(f"Cannot compare images of shape {a.shape} and {b.shape}")
    diff = a.planes.astype(np.float64) - b.planes.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(MAX_SAMPLE ** 2 / mse)


# ---------------- Reassembly scores -----------------
def _check_sizes(asm: PuzzleAssembly, truth: TransformRecord) -> None:
    if (asm.cols, asm.rows) != (truth.cols, truth.rows):
        raise DimensionError(
            f"Assembly grid {asm.cols}x{asm.rows} does not match the encryption grid {truth.cols}x{truth.rows}"
        )


def correct_variants(asm: PuzzleAssembly, truth: TransformRecord) -> np.ndarray:
    """Per piece: does the chosen variant undo the encryption pose and polarity?"""
    _check_sizes(asm, truth)
    undone = COMPOSE[asm.poses, truth.poses] == 0
    return undone & (asm.polarity == truth.polarity)


def _correct_boundaries(asm: PuzzleAssembly, truth: TransformRecord) -> List[Tuple[int, int]]:
    """Slot pairs ``(s, t)`` whose pieces are true neighbours, both correctly posed."""
    ok = correct_variants(asm, truth)
    slots = asm.slot_grid()
    original = truth.permutation[slots]
    good = ok[slots]
    cols = asm.cols
    edges: List[Tuple[int, int]] = []
    # left-right
    right = (original[:, 1:] == original[:, :-1] + 1) & (original[:, :-1] % cols != cols - 1)
    right &= good[:, 1:] & good[:, :-1]
    for r, c in zip(*np.nonzero(right)):
        edges.append((int(r * cols + c), int(r * cols + c + 1)))
    # top-bottom
    down = (original[1:, :] == original[:-1, :] + cols) & good[1:, :] & good[:-1, :]
    for r, c in zip(*np.nonzero(down)):
        edges.append((int(r * cols + c), int((r + 1) * cols + c)))
    return edges


def direct_comparison(asm: PuzzleAssembly, truth: TransformRecord) -> float:
    ok = correct_variants(asm, truth)
    at_home = asm.positions == truth.permutation
    return float(np.count_nonzero(ok & at_home)) / asm.n


def neighbor_comparison(asm: PuzzleAssembly, truth: TransformRecord) -> float:
    total = boundary_count(asm.cols, asm.rows)
    if total == 0:
        return float(correct_variants(asm, truth).all())
    return len(_correct_boundaries(asm, truth)) / total


def largest_component(asm: PuzzleAssembly, truth: TransformRecord) -> float:
    graph = nx.Graph()
    graph.add_nodes_from(range(asm.n))
    graph.add_edges_from(_correct_boundaries(asm, truth))
    largest = max(len(component) for component in nx.connected_components(graph))
    return largest / asm.n


def score_assembly(asm: PuzzleAssembly, truth: TransformRecord) -> AssemblyScore:
    return AssemblyScore(
        dc=direct_comparison(asm, truth),
        nc=neighbor_comparison(asm, truth),
        lc=largest_component(asm, truth),
    )


def reframe(asm: PuzzleAssembly, frame: D4Pose, negative: int) -> PuzzleAssembly:
    """View the whole assembly through a global mirror/flip/half turn and optional negative."""
    if frame.rotation % 2:
        raise ConfigError("Only dimension-preserving frames can be applied to an assembly")
    rows, cols = divmod(asm.positions, asm.cols)
    if frame in (D4Pose(0, 1), D4Pose(2, 0)):
        cols = asm.cols - 1 - cols
    if frame in (D4Pose.flip_v(), D4Pose(2, 0)):
        rows = asm.rows - 1 - rows
    return PuzzleAssembly(
        positions=rows * asm.cols + cols,
        poses=COMPOSE[frame.index, asm.poses],
        polarity=asm.polarity ^ int(negative),
        cols=asm.cols,
        rows=asm.rows,
        channel_perm=asm.channel_perm,
    )


def score_normalised(asm: PuzzleAssembly, truth: TransformRecord) -> AssemblyScore:
    """Best score over the global frames an attacker can resolve by eye."""
    best = None
    for frame in FRAMES:
        for negative in (0, 1):
            score = score_assembly(reframe(asm, frame, negative), truth)
            if best is None or score.total > best.total:
                best = score
    return best


def average_scores(scores: Iterable[AssemblyScore]) -> AssemblyScore:
    items = list(scores)
    if not items:
        raise ConfigError("Cannot average an empty list of scores")
    return AssemblyScore(
        dc=float(np.mean([s.dc for s in items])),
        nc=float(np.mean([s.nc for s in items])),
        lc=float(np.mean([s.lc for s in items])),
    )
