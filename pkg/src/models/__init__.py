"""In-memory domain types for images, keys, transforms and puzzle assemblies."""

# Images and block grids
from .image import BlockGrid, Image, PlaneLayout

# Keys
from .keys import SecretKey, StepKeys

# Encryption transforms
from .transform import ALL_POSES, CHANNEL_PERMS, D4Pose, TransformRecord

# Cipher, codec and solver parameters
from .configs import CipherConfig, JpegParams, SolverConfig

# Jigsaw assemblies
from .puzzle import PieceVariant, PuzzleAssembly

__all__ = [
    "ALL_POSES",
    "BlockGrid",
    "CHANNEL_PERMS",
    "CipherConfig",
    "D4Pose",
    "Image",
    "JpegParams",
    "PieceVariant",
    "PlaneLayout",
    "PuzzleAssembly",
    "SecretKey",
    "SolverConfig",
    "StepKeys",
    "TransformRecord",
]
