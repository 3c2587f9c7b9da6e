"""Seed hypervector banks: random ID vectors and linearly-correlated levels.

A SeedSet is everything an encoder needs: one quasi-orthogonal random
hypervector per feature index, plus a chain of q level hypervectors whose
pairwise distance grows linearly with the level gap. Banks are regenerated
per run seed, so different runs draw different seed hypervectors while any
single run is fully reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, InvalidQuantization
from .hv import Hypervector, Mode, pack_bit_matrix
from .rng import SEED_BANK, RngStream


@dataclass(frozen=True)
class SeedSet:
    """Immutable ID and level hypervector banks for one run."""

    ids: list[Hypervector]
    levels: list[Hypervector]
    mode: Mode
    dim: int
    seed: int

    @property
    def q(self) -> int:
        return len(self.levels)


def generate_random_hvs(rng: RngStream, count: int, dim: int, mode: Mode) -> list[Hypervector]:
    """Draw ``count`` i.i.d. random hypervectors from ``rng``.

    Binary vectors take fair bits; integer vectors take uniform {-1,+1}.
    Any two outputs are quasi-orthogonal at large dim (normalized Hamming
    concentrates around 0.5).
    """
    if count < 1:
        raise EmptyInput(f"count must be at least 1, got {count}")
    if dim < 1:
        raise EmptyInput(f"dim must be at least 1, got {dim}")
    if mode is Mode.BINARY:
        bits = rng.bits(count * dim).reshape(count, dim)
        packed = pack_bit_matrix(bits)
        packed.flags.writeable = False
        return [Hypervector(Mode.BINARY, dim, packed[i]) for i in range(count)]
    values = rng.bipolar(count * dim).reshape(count, dim)
    return [Hypervector(Mode.INTEGER, dim, values[i]) for i in range(count)]


def generate_level_hvs(rng: RngStream, q: int, dim: int, mode: Mode) -> list[Hypervector]:
    """Build the level chain L_1..L_q by cumulative disjoint flips.

    L_1 is random. Each subsequent level flips one fresh block of
    floor(dim / (2*(q-1))) positions, the blocks being a random partition of
    at most half the dimensions, drawn once. Distances are therefore exactly
    linear in the level gap, delta(L_i, L_j) = |i-j| * block / dim, and the
    two extreme levels are quasi-orthogonal. Residual dimensions that do not
    fill a whole block are never flipped.
    """
    if q < 2:
        raise InvalidQuantization(f"q must be at least 2, got {q}")
    block = dim // (2 * (q - 1))
    order = rng.permutation(dim)
    if mode is Mode.BINARY:
        current = rng.bits(dim)
        rows = np.empty((q, dim), dtype=np.uint8)
        rows[0] = current
        for i in range(1, q):
            flip = order[(i - 1) * block : i * block]
            current = current.copy()
            current[flip] ^= 1
            rows[i] = current
        packed = pack_bit_matrix(rows)
        packed.flags.writeable = False
        return [Hypervector(Mode.BINARY, dim, packed[i]) for i in range(q)]
    current = rng.bipolar(dim)
    levels = []
    for i in range(q):
        if i > 0:
            flip = order[(i - 1) * block : i * block]
            current = current.copy()
            current[flip] *= -1
        levels.append(Hypervector(Mode.INTEGER, dim, current))
    return levels


def make_seed_set(seed: int, n_features: int, q: int, dim: int, mode: Mode) -> SeedSet:
    """Generate the banks for one run seed.

    Consumption order within the run's seed-bank stream is fixed: ID
    hypervectors first, then the level chain. Regenerating with the same
    arguments yields bit-identical banks.
    """
    stream = RngStream(seed).child(SEED_BANK)
    ids = generate_random_hvs(stream, n_features, dim, mode)
    levels = generate_level_hvs(stream, q, dim, mode)
    return SeedSet(ids=ids, levels=levels, mode=mode, dim=dim, seed=seed)
