"""Key schedule: ChaCha20 keystreams, step-key derivation and per-block draws.

Each step key seeds its own ChaCha20 stream (zero nonce). Integers are drawn
from little-endian 32-bit words with rejection sampling, so every draw is
exactly uniform over its domain and the mapping is reproducible from the
published ChaCha20 test vectors.
"""
import logging
from typing import Optional

import numpy as np
from Crypto.Cipher import ChaCha20
from Crypto.Hash import SHA256
from Crypto.Random import get_random_bytes

from src.core.errors import EmptyDomainError
from src.models.keys import MASTER_BYTES, NONCE_BYTES, SUBKEY_BYTES, SecretKey, StepKeys

logger = logging.getLogger(__name__)

WORD_SPACE = 1 << 32
# Keystream is pulled in whole ChaCha20 blocks.
CHUNK_BYTES = 64 * 64


class KeyStream:
    """Buffered ChaCha20 keystream with unbiased bounded-integer draws."""

    def __init__(self, key: bytes, nonce: bytes = bytes(NONCE_BYTES)) -> None:
        self._cipher = ChaCha20.new(key=key, nonce=nonce)
        self._words = np.empty(0, dtype="<u4")
        self._pos = 0

    def read(self, count: int) -> bytes:
        """Raw keystream bytes; only valid before any word draw."""
        return self._cipher.encrypt(bytes(count))

    def _refill(self) -> None:
        raw = self._cipher.encrypt(bytes(CHUNK_BYTES))
        self._words = np.frombuffer(raw, dtype="<u4").astype(np.uint64)
        self._pos = 0

    def words(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.uint64)
        filled = 0
        while filled < count:
            if self._pos >= len(self._words):
                self._refill()
            take = min(count - filled, len(self._words) - self._pos)
            out[filled:filled + take] = self._words[self._pos:self._pos + take]
            self._pos += take
            filled += take
        return out

    def randbelow(self, m: int) -> int:
        """Uniform integer in ``[0, m)``."""
        return int(self.draws(m, 1)[0])

    def draws(self, m: int, count: int) -> np.ndarray:
        """``count`` uniform integers in ``[0, m)``, identical to ``count`` calls of :meth:`randbelow`."""
        if m < 1:
            raise EmptyDomainError(f"Cannot draw from an empty domain (m={m})")
        limit = WORD_SPACE - (WORD_SPACE % m)
        accepted = np.empty(0, dtype=np.uint64)
        while len(accepted) < count:
            batch = self.words(count - len(accepted))
            accepted = np.concatenate([accepted, batch[batch < limit]])
        return (accepted % m).astype(np.int64)


def derive_step_keys(sk: SecretKey) -> StepKeys:
    """Split the first 128 keystream bytes under (master, nonce) into K1..K4."""
    stream = ChaCha20.new(key=sk.master, nonce=sk.image_nonce).encrypt(bytes(4 * SUBKEY_BYTES))
    logger.debug("Derived step keys for key %s", key_fingerprint(sk))
    return StepKeys(*(stream[i * SUBKEY_BYTES:(i + 1) * SUBKEY_BYTES] for i in range(4)))


def gen_permutation(k1: bytes, n: int) -> np.ndarray:
    """Fisher-Yates shuffle of ``range(n)``; ``perm[i]`` is the block moved to position ``i``."""
    if n < 1:
        raise EmptyDomainError(f"Cannot permute an empty set of blocks (n={n})")
    stream = KeyStream(k1)
    perm = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = stream.randbelow(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def gen_poses(k2: bytes, n: int) -> np.ndarray:
    """Pose indices in ``[0, 8)`` (see :class:`src.models.transform.D4Pose`)."""
    return KeyStream(k2).draws(8, n)


def gen_polarity(k3: bytes, n: int) -> np.ndarray:
    return KeyStream(k3).draws(2, n)


def gen_channel_perms(k4: bytes, n: int) -> np.ndarray:
    """Indices into :data:`src.models.transform.CHANNEL_PERMS`."""
    return KeyStream(k4).draws(6, n)


def generate_secret_key(seed: Optional[bytes] = None) -> SecretKey:
    """Fresh key from the OS CSPRNG, or a reproducible one from ``seed``."""
    if seed is None:
        return SecretKey(get_random_bytes(MASTER_BYTES), get_random_bytes(NONCE_BYTES))
    digest = SHA256.new(seed).digest()
    material = KeyStream(digest).read(MASTER_BYTES + NONCE_BYTES)
    return SecretKey(material[:MASTER_BYTES], material[MASTER_BYTES:])


def trial_key(seed: bytes, index: int) -> SecretKey:
    """Independent key for the ``index``-th encryption of an attack run."""
    return generate_secret_key(seed + index.to_bytes(4, "big"))


def key_fingerprint(sk: SecretKey) -> str:
    """Short identifier that reveals nothing about the master secret."""
    return SHA256.new(sk.image_nonce).hexdigest()[:8]
