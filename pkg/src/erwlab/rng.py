"""Counter-based random streams for reproducible parallel Monte Carlo.

Every random draw in this package is a pure function of
``(master_seed, stream, path_index, counter)``.  A path's 64-bit key is

    key = mix64(mix64(master_seed + (stream + 1) * STREAM_SALT)
                + (path_index + 1) * GOLDEN)

and draw ``j`` of that path is ``mix64(key + (j + 1) * GOLDEN)``, mapped
to a double in [0, 1) from its top 53 bits.  ``mix64`` is the SplitMix64
finalizer (Steele, Lea & Flood's SplittableRandom construction), so each
per-path stream is a SplitMix64 sequence and distinct paths get
independent-looking keys.  Because a draw never depends on generator
state, batches are bit-for-bit reproducible no matter how paths are
chunked or scheduled across threads.

Constants: GOLDEN is the 64-bit golden ratio 0x9E3779B97F4A7C15; the
finalizer multipliers are 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
import numba as nb  # noqa: E402

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_MULT_1 = 0xBF58476D1CE4E5B9
MIX_MULT_2 = 0x94D049BB133111EB
STREAM_SALT = 0xD2B74407B1CE6E93

# stream ids, one per consumer of randomness
STREAM_WALK = 0
STREAM_LIMIT = 1
STREAM_JOINT = 2


def mix64_int(x: int) -> int:
    """SplitMix64 finalizer on a Python int, reduced mod 2**64."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * MIX_MULT_1) & MASK64
    x = ((x ^ (x >> 27)) * MIX_MULT_2) & MASK64
    return x ^ (x >> 31)


def mix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over a uint64 array."""
    x = (x ^ (x >> np.uint64(30))) * np.uint64(MIX_MULT_1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(MIX_MULT_2)
    return x ^ (x >> np.uint64(31))


@nb.njit(nb.uint64(nb.uint64), inline="always", cache=True)
def mix64_nb(x):  # pragma: no cover - exercised through the jitted kernels
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB
    return x ^ (x >> 31)


def stream_seed(master_seed: int, stream: int) -> int:
    """Mix a stream id into the master seed."""
    return mix64_int(master_seed + (stream + 1) * STREAM_SALT)


def path_keys(master_seed: int, start: int, count: int, stream: int = STREAM_WALK) -> np.ndarray:
    """uint64 keys for paths ``start .. start+count-1`` of a stream."""
    if not 0 <= master_seed <= MASK64:
        raise ValueError("master_seed must fit in 64 bits")
    if start < 0 or count < 0:
        raise ValueError("path range must be nonnegative")
    base = np.uint64(stream_seed(master_seed, stream))
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return mix64(base + idx * np.uint64(GOLDEN))


def uniforms(keys: np.ndarray, counter: int) -> np.ndarray:
    """Draw uniform doubles in [0, 1), one per key, at a given counter."""
    ctr = np.uint64(((counter + 1) * GOLDEN) & MASK64)
    return (mix64(keys + ctr) >> np.uint64(11)) * 2.0**-53


def derive_seed(master_seed: int, tag: str) -> int:
    """Stable 64-bit sub-seed for a named purpose (batch tag, sampler, ...)."""
    digest = hashlib.blake2b(
        tag.encode(), key=(master_seed & MASK64).to_bytes(8, "little"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")
