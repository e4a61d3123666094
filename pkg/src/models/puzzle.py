"""Jigsaw pieces, their transform hypotheses and solver assemblies."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.core.errors import GridError
from src.models.transform import D4Pose


@dataclass(frozen=True)
class PieceVariant:
    """A piece under one (pose, polarity, channel order) hypothesis."""

    piece_id: int
    pose: D4Pose
    polarity: int
    pixels: np.ndarray
    channel_perm: int = 0


@dataclass(frozen=True)
class PuzzleAssembly:
    """A complete arrangement of ``cols x rows`` pieces.

    Arrays are indexed by piece id (the scrambled position the piece was cut
    from): ``positions[j]`` is the row-major slot it was placed in, and
    ``poses``/``polarity``/``channel_perm`` are the variant it was placed with.
    """

    positions: np.ndarray
    poses: np.ndarray
    polarity: np.ndarray
    cols: int
    rows: int
    channel_perm: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = self.cols * self.rows
        for name in ("positions", "poses", "polarity"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.shape != (n,):
                raise GridError(f"PuzzleAssembly.{name} has shape {arr.shape}, expected ({n},)")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if sorted(self.positions.tolist()) != list(range(n)):
            raise GridError("PuzzleAssembly does not place every piece in exactly one slot")
        if self.channel_perm is not None:
            arr = np.asarray(self.channel_perm, dtype=np.int64)
            if arr.shape != (n,):
                raise GridError(f"PuzzleAssembly.channel_perm has shape {arr.shape}, expected ({n},)")
            arr.flags.writeable = False
            object.__setattr__(self, "channel_perm", arr)

    @property
    def n(self) -> int:
        return self.cols * self.rows

    def channel_perms(self) -> np.ndarray:
        if self.channel_perm is None:
            return np.zeros(self.n, dtype=np.int64)
        return self.channel_perm

    def slot_grid(self) -> np.ndarray:
        """``(rows, cols)`` array of the piece id in each slot."""
        grid = np.empty(self.n, dtype=np.int64)
        grid[self.positions] = np.arange(self.n)
        return grid.reshape(self.rows, self.cols)

    @classmethod
    def identity(cls, cols: int, rows: int) -> "PuzzleAssembly":
        n = cols * rows
        zeros = np.zeros(n, dtype=np.int64)
        return cls(np.arange(n), zeros, zeros, cols, rows)

    @property
    def dims(self) -> Tuple[int, int]:
        return (self.cols, self.rows)
