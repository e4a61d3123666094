"""Block transforms: the dihedral pose group and the per-block ground truth of an encryption."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Tuple

import numpy as np

from src.core.errors import DimensionError

# All orderings of three colour components, indexed 0..5.
CHANNEL_PERMS: Tuple[Tuple[int, int, int], ...] = tuple(permutations(range(3)))


def invert_channel_perm(index: int) -> int:
    perm = CHANNEL_PERMS[index]
    inverse = tuple(int(i) for i in np.argsort(perm))
    return CHANNEL_PERMS.index(inverse)


@dataclass(frozen=True, order=True)
class D4Pose:
    """One of the eight symmetries of a square block.

    ``rotation`` counts clockwise quarter turns; ``flip_h`` mirrors left/right
    after the rotation. Poses are indexed ``rotation + 4 * flip_h``.
    """

    rotation: int = 0
    flip_h: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotation", int(self.rotation) % 4)
        object.__setattr__(self, "flip_h", int(bool(self.flip_h)))

    @property
    def index(self) -> int:
        return self.rotation + 4 * self.flip_h

    @classmethod
    def from_index(cls, index: int) -> "D4Pose":
        if not 0 <= index < 8:
            raise ValueError(f"Pose index must be in [0, 8), got {index}")
        return cls(index % 4, index // 4)

    @classmethod
    def identity(cls) -> "D4Pose":
        return cls(0, 0)

    @classmethod
    def flip_v(cls) -> "D4Pose":
        return cls(2, 1)

    def compose(self, other: "D4Pose") -> "D4Pose":
        """The pose obtained by applying ``other`` first and then ``self``."""
        if other.flip_h == 0:
            return D4Pose(self.rotation + other.rotation, self.flip_h)
        return D4Pose(other.rotation - self.rotation, self.flip_h ^ 1)

    def inverse(self) -> "D4Pose":
        if self.flip_h:
            return self
        return D4Pose(-self.rotation, 0)

    def apply(self, tile: np.ndarray) -> np.ndarray:
        """Transform the last two axes of ``tile``."""
        out = np.rot90(tile, k=-self.rotation, axes=(-2, -1))
        if self.flip_h:
            out = out[..., ::-1]
        return out

    def __str__(self) -> str:
        return f"rot{90 * self.rotation}" + ("+flip" if self.flip_h else "")


ALL_POSES: Tuple[D4Pose, ...] = tuple(D4Pose.from_index(i) for i in range(8))


@dataclass(frozen=True)
class TransformRecord:
    """Ground truth of one encryption, indexed by scrambled position.

    ``permutation[i]`` is the original block placed at scrambled position ``i``;
    ``poses``, ``polarity`` and ``channel_perm`` hold the draws applied to that
    block (pose indices, bits and indices into :data:`CHANNEL_PERMS`).
    ``cols`` x ``rows`` is the block grid of the encrypted plane.
    """

    permutation: np.ndarray
    poses: np.ndarray
    polarity: np.ndarray
    cols: int
    rows: int
    channel_perm: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = self.cols * self.rows
        for name in ("permutation", "poses", "polarity"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.shape != (n,):
                raise DimensionError(f"TransformRecord.{name} has shape {arr.shape}, expected ({n},)")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if sorted(self.permutation.tolist()) != list(range(n)):
            raise DimensionError("TransformRecord.permutation is not a bijection")
        if self.channel_perm is not None:
            arr = np.asarray(self.channel_perm, dtype=np.int64)
            if arr.shape != (n,):
                raise DimensionError(f"TransformRecord.channel_perm has shape {arr.shape}, expected ({n},)")
            arr.flags.writeable = False
            object.__setattr__(self, "channel_perm", arr)

    @property
    def n(self) -> int:
        return self.cols * self.rows

    def inverse_permutation(self) -> np.ndarray:
        """``inv[b]`` is the scrambled position holding original block ``b``."""
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.permutation] = np.arange(self.n)
        return inv

    @classmethod
    def identity(cls, cols: int, rows: int, with_channels: bool = False) -> "TransformRecord":
        n = cols * rows
        zeros = np.zeros(n, dtype=np.int64)
        return cls(np.arange(n), zeros, zeros, cols, rows, zeros if with_channels else None)
