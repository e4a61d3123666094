"""Tests for the key schedule: keystream, step keys and per-block draws."""

import logging
from collections import Counter

import numpy as np
import pytest
from Crypto.Cipher import ChaCha20
from Crypto.Hash import SHA256

from src.core.errors import EmptyDomainError, KeyFileError
from src.core.security import (
    KeyStream,
    derive_step_keys,
    gen_channel_perms,
    gen_permutation,
    gen_polarity,
    gen_poses,
    generate_secret_key,
    key_fingerprint,
    trial_key,
)
from src.models.keys import SecretKey

# First ChaCha20 block for an all-zero key and nonce (RFC 8439, A.1 #1).
ZERO_BLOCK = bytes.fromhex(
    "76b8e0ada0f13d90405d6ae55386bd28bdd219b8a08ded1aa836efcc8b770dc7"
    "da41597c5157488d7724e03fb8d84a376a43b8f41518a11cc387b669b2ee6586"
)
# Second block of the same stream (RFC 8439, A.1 #2).
SECOND_ZERO_BLOCK = bytes.fromhex(
    "9f07e7be5551387a98ba977c732d080dcb0f29a048e3656912c6533e32ee7aed"
    "29b721769ce64e43d57133b074d839d531ed1f28510afb45ace10a1f4b794d6f"
)

# ---------------------------------------------------------------------------
# Keystream
# ---------------------------------------------------------------------------
def test_keystream_matches_published_vector():
    assert KeyStream(bytes(32)).read(64) == ZERO_BLOCK

def test_step_keys_for_zero_master_are_leading_keystream_bytes(zero_key):
    keys = derive_step_keys(zero_key)
    assert keys.k1 == ZERO_BLOCK[:32]
    assert keys.k2 == ZERO_BLOCK[32:]
    assert len({keys.k1, keys.k2, keys.k3, keys.k4}) == 4

def test_draws_equal_repeated_randbelow():
    batch = KeyStream(b"\x01" * 32).draws(6, 500)
    single = KeyStream(b"\x01" * 32)
    assert batch.tolist() == [single.randbelow(6) for _ in range(500)]

def test_draws_stay_in_range():
    values = KeyStream(b"\x02" * 32).draws(7, 2000)
    assert values.min() >= 0 and values.max() < 7

def test_empty_domain_rejected():
    with pytest.raises(EmptyDomainError):
        KeyStream(bytes(32)).draws(0, 1)
    with pytest.raises(EmptyDomainError):
        gen_permutation(bytes(32), 0)

# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------
def test_permutation_is_bijection_and_deterministic():
    perm = gen_permutation(b"\x03" * 32, 300)
    assert sorted(perm.tolist()) == list(range(300))
    assert np.array_equal(perm, gen_permutation(b"\x03" * 32, 300))
    assert not np.array_equal(perm, gen_permutation(b"\x04" * 32, 300))

def test_single_block_permutation_is_identity():
    assert gen_permutation(b"\x05" * 32, 1).tolist() == [0]

def test_draw_domains():
    key = b"\x06" * 32
    assert set(gen_poses(key, 400).tolist()) == set(range(8))
    assert set(gen_polarity(key, 400).tolist()) == {0, 1}
    assert set(gen_channel_perms(key, 400).tolist()) == set(range(6))

def test_all_permutations_of_three_reachable():
    seen = {tuple(gen_permutation(bytes([i]) * 32, 3)) for i in range(200)}
    assert len(seen) == 6


# ---------------------------------------------------------------------------
# Golden draws
# ---------------------------------------------------------------------------
# A zero subkey streams ZERO_BLOCK; its first words are 0xade0b876,
# 0x903df1a0, 0xe56a5d40, 0x28bd8653, 0xb819d2bd, 0x1aed8da0, 0xccef36a8, 0xc70d778b.
def test_golden_permutation_of_four():
    assert gen_permutation(bytes(32), 4).tolist() == [1, 3, 0, 2]

def test_golden_poses():
    assert gen_poses(bytes(32), 3).tolist() == [6, 0, 0]

def test_golden_polarity():
    assert gen_polarity(bytes(32), 8).tolist() == [0, 0, 0, 1, 1, 0, 0, 1]

def test_golden_channel_perms():
    assert gen_channel_perms(bytes(32), 4).tolist() == [0, 0, 0, 5]

def test_golden_step_keys_for_zero_master(zero_key):
    keys = derive_step_keys(zero_key)
    assert keys.k3 + keys.k4 == SECOND_ZERO_BLOCK

def _reference_permutation(key, n):
    """Plain-integer Fisher-Yates over the raw keystream."""
    stream = ChaCha20.new(key=key, nonce=bytes(12))
    words = iter(np.frombuffer(stream.encrypt(bytes(4 * 4 * n + 4096)), dtype="<u4").tolist())
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        m = i + 1
        limit = 2**32 - 2**32 % m
        word = next(w for w in words if w < limit)
        j = word % m
        perm[i], perm[j] = perm[j], perm[i]
    return perm

@pytest.mark.parametrize("seed", [b"a", b"b", b"c"])
def test_permutation_matches_reference_shuffle(seed):
    key = SHA256.new(seed).digest()
    assert gen_permutation(key, 97).tolist() == _reference_permutation(key, 97)

# ---------------------------------------------------------------------------
# Uniformity
# ---------------------------------------------------------------------------
def _within_five_sigma(counts, draws, cells):
    p = 1.0 / cells
    sigma = np.sqrt(draws * p * (1 - p))
    return np.all(np.abs(np.asarray(counts) - draws * p) <= 5 * sigma)

def test_permutations_of_five_are_uniform():
    draws = 10_000
    counts = Counter(tuple(gen_permutation(i.to_bytes(32, "big"), 5)) for i in range(draws))
    assert len(counts) == 120
    assert _within_five_sigma(list(counts.values()), draws, 120)
    expected = draws / 120
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    # 119 degrees of freedom: mean 119, standard deviation about 15.4
    assert chi2 < 200

def test_poses_are_uniform():
    counts = np.bincount(gen_poses(b"\x07" * 32, 80_000), minlength=8)
    assert _within_five_sigma(counts, 80_000, 8)

def test_channel_perms_are_uniform():
    counts = np.bincount(gen_channel_perms(b"\x08" * 32, 60_000), minlength=6)
    assert _within_five_sigma(counts, 60_000, 6)

def test_polarity_is_balanced():
    assert 0.495 <= gen_polarity(b"\x09" * 32, 100_000).mean() <= 0.505

# ---------------------------------------------------------------------------
# Secret keys
# ---------------------------------------------------------------------------
def test_seeded_key_is_reproducible():
    a = generate_secret_key(b"seed")
    b = generate_secret_key(b"seed")
    assert a == b
    assert a != generate_secret_key(b"other")

def test_unseeded_keys_differ():
    assert generate_secret_key().image_nonce != generate_secret_key().image_nonce

def test_trial_keys_are_independent():
    keys = {trial_key(b"attack", i).master for i in range(5)}
    assert len(keys) == 5

def test_key_lengths_are_checked():
    with pytest.raises(KeyFileError):
        SecretKey(bytes(31), bytes(12))
    with pytest.raises(KeyFileError):
        SecretKey(bytes(32), bytes(8))

def test_key_material_never_logged(secret_key, caplog):
    derive_step_keys(secret_key)
    assert secret_key.master.hex() not in caplog.text
    assert "hidden" in repr(secret_key)
    fingerprint = key_fingerprint(secret_key)
    assert len(fingerprint) == 8
    assert fingerprint in caplog.text
