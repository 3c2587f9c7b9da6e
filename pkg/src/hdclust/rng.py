"""Deterministic random streams for reproducible runs.

Every stochastic choice in a run is drawn from streams derived from one
64-bit run seed, so a run is replayable from a single integer. Streams are
PCG64 generators keyed by (seed, spawn_key); the same key always yields the
same bit sequence, on every platform, regardless of the order in which
streams are created. This is what makes parallel row encoding produce output
identical to sequential encoding.

Stream layout per run seed (the spawn-key prefixes below):

* ``SEED_BANK``   -- ID hypervectors, then level hypervectors, in that order.
* ``ENCODE_TIES`` -- majority tie-break bits for row encoding, keyed by the
                     row's quantized level pattern (see ``content_key``).
                     Identical rows therefore encode to identical queries,
                     and encoding does not depend on row order or
                     subsetting, while distinct rows draw independent bits.
* ``ALGO``        -- algorithm-internal draws, consumed sequentially: anchor
                     pick, k-means seeding, random cluster centers.
* ``REGEN_TIES``  -- one sequential stream of majority tie-break bits for
                     center regeneration, consumed cluster 0 upward, one
                     block of dim bits per even-sized cluster per rebuild.
                     Bits are fresh on every rebuild; a tied dimension
                     re-randomizes each iteration.
"""

from __future__ import annotations

import hashlib

import numpy as np

SEED_BANK = 0
ENCODE_TIES = 1
ALGO = 2
REGEN_TIES = 3


def content_key(values) -> tuple[int, ...]:
    """Stable spawn-key fragment for an integer content vector.

    Hashes the canonical little-endian int64 byte string, so the key is
    identical across platforms and runs for equal content.
    """
    data = np.ascontiguousarray(values, dtype="<i8").tobytes()
    digest = hashlib.blake2b(data, digest_size=16).digest()
    return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))


class RngStream:
    """A named deterministic PCG64 stream derived from a 64-bit seed.

    ``child(*key)`` derives an independent stream; calling it twice with the
    same key gives two streams that emit identical sequences.
    """

    def __init__(self, seed: int, _spawn_key: tuple[int, ...] = ()):
        if not 0 <= int(seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.spawn_key = _spawn_key
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=_spawn_key))
        )

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.spawn_key + tuple(int(k) for k in key))

    def bits(self, count: int) -> np.ndarray:
        """``count`` i.i.d. fair bits as a uint8 array of 0/1."""
        return self._gen.integers(0, 2, size=count, dtype=np.uint8)

    def bipolar(self, count: int) -> np.ndarray:
        """``count`` i.i.d. uniform draws from {-1, +1} as int64."""
        return self._gen.integers(0, 2, size=count, dtype=np.int64) * 2 - 1

    def integer(self, low: int, high: int) -> int:
        """One uniform integer in [low, high)."""
        return int(self._gen.integers(low, high))

    def uniform(self, size=None):
        return self._gen.random(size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key})"
