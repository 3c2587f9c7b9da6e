"""Hypervector algebra: bind, bundle, permute, similarity.

Two carrier types share one interface. Binary hypervectors live in {0,1}^d
and are stored bit-packed (8 dims per byte) so Hamming distance reduces to
XOR plus popcount; integer hypervectors hold bipolar seeds in {-1,+1}^d and
their bundled compounds, which stay plain integer sums. Hypervectors are
immutable after construction and all operations are pure functions.

The module-level matrix helpers (``hamming_matrix``, ``pairwise_hamming``,
``cosine_matrix``) are the vectorized equivalents used by the clustering
loops; they compute exactly the same quantity as ``similarity`` applied
pairwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    ModeMismatch,
    TieBreakRequired,
    ZeroVector,
)
from .rng import RngStream


class Mode(enum.Enum):
    BINARY = "binary"
    INTEGER = "integer"


class Metric(enum.Enum):
    NORMALIZED_HAMMING = "hamming"  # in [0,1], lower is more similar
    COSINE = "cosine"  # in [-1,1], higher is more similar


@dataclass(frozen=True)
class SimilarityValue:
    value: float
    metric: Metric

    def more_similar_than(self, other: "SimilarityValue") -> bool:
        if self.metric is not other.metric:
            raise ModeMismatch("cannot compare similarities under different metrics")
        if self.metric is Metric.NORMALIZED_HAMMING:
            return self.value < other.value
        return self.value > other.value


class Hypervector:
    """Immutable d-dimensional binary (bit-packed) or integer vector."""

    __slots__ = ("mode", "dim", "data")

    def __init__(self, mode: Mode, dim: int, data: np.ndarray):
        if dim < 1:
            raise DimensionMismatch(f"dim must be positive, got {dim}")
        data = np.asarray(data)
        if mode is Mode.BINARY:
            if data.dtype != np.uint8 or data.shape != (packed_length(dim),):
                raise ValueError("binary payload must be the packed uint8 array")
        else:
            if data.shape != (dim,):
                raise DimensionMismatch(
                    f"integer payload has length {data.shape}, expected {dim}"
                )
            data = data.astype(np.int64, copy=False)
        data = data.copy() if data.flags.writeable else data
        data.flags.writeable = False
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Hypervector is immutable")

    @classmethod
    def from_bits(cls, bits) -> "Hypervector":
        """Build a binary hypervector from an iterable of 0/1 values."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise DimensionMismatch("bits must be one-dimensional")
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("binary payload bits must be 0 or 1")
        return cls(Mode.BINARY, bits.size, np.packbits(bits))

    @classmethod
    def from_ints(cls, values) -> "Hypervector":
        values = np.asarray(values, dtype=np.int64)
        if values.ndim != 1:
            raise DimensionMismatch("values must be one-dimensional")
        return cls(Mode.INTEGER, values.size, values)

    def bits(self) -> np.ndarray:
        """Unpacked 0/1 uint8 array (binary mode only)."""
        if self.mode is not Mode.BINARY:
            raise ModeMismatch("bits() is only defined for binary hypervectors")
        return np.unpackbits(self.data)[: self.dim]

    def values(self) -> np.ndarray:
        if self.mode is Mode.BINARY:
            return self.bits()
        return self.data

    def __eq__(self, other):
        return (
            isinstance(other, Hypervector)
            and self.mode is other.mode
            and self.dim == other.dim
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.mode, self.dim, self.data.tobytes()))

    def __repr__(self):
        return f"Hypervector(mode={self.mode.value}, dim={self.dim})"


def packed_length(dim: int) -> int:
    return (dim + 7) // 8


def _check_pair(a: Hypervector, b: Hypervector):
    if a.mode is not b.mode:
        raise ModeMismatch(f"cannot combine {a.mode.value} with {b.mode.value}")
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")


def bind(a: Hypervector, b: Hypervector) -> Hypervector:
    """Associate two hypervectors: XOR in binary mode, product in integer mode.

    Binding preserves pairwise distance exactly: binding both operands with
    the same vector leaves their mutual similarity unchanged.
    """
    _check_pair(a, b)
    if a.mode is Mode.BINARY:
        return Hypervector(Mode.BINARY, a.dim, np.bitwise_xor(a.data, b.data))
    return Hypervector(Mode.INTEGER, a.dim, a.data * b.data)


def bundle(vs: list[Hypervector], tie_breaker: RngStream | None = None) -> Hypervector:
    """Superpose hypervectors: majority vote (binary) or element sum (integer).

    Integer compounds are never renormalized; they stay in Z^d. For a binary
    bundle of an even number of vectors the per-dimension vote can tie; ties
    take bits from ``tie_breaker``. Whenever the input count is even, exactly
    ``dim`` bits are drawn, so stream consumption does not depend on the data.
    """
    if len(vs) == 0:
        raise EmptyInput("bundle of zero hypervectors")
    first = vs[0]
    for v in vs[1:]:
        _check_pair(first, v)
    if first.mode is Mode.INTEGER:
        total = np.sum(np.stack([v.data for v in vs]), axis=0, dtype=np.int64)
        return Hypervector(Mode.INTEGER, first.dim, total)

    counts = np.sum(np.stack([v.bits() for v in vs]), axis=0, dtype=np.int64)
    m = len(vs)
    out = (2 * counts > m).astype(np.uint8)
    if m % 2 == 0:
        tied = 2 * counts == m
        if tie_breaker is not None:
            tie_bits = tie_breaker.bits(first.dim)
            out[tied] = tie_bits[tied]
        elif np.any(tied):
            raise TieBreakRequired(
                "even-count binary majority tied; pass a tie_breaker stream"
            )
    return Hypervector.from_bits(out)


def permute(a: Hypervector, times: int) -> Hypervector:
    """Circularly shift the payload ``times`` positions (a bijection)."""
    if times < 0:
        raise ValueError("times must be non-negative")
    shift = times % a.dim
    if shift == 0:
        return a
    if a.mode is Mode.BINARY:
        return Hypervector.from_bits(np.roll(a.bits(), shift))
    return Hypervector(Mode.INTEGER, a.dim, np.roll(a.data, shift))


def complement(a: Hypervector) -> Hypervector:
    """Flip every bit (binary) or negate every element (integer)."""
    if a.mode is Mode.BINARY:
        return Hypervector.from_bits(1 - a.bits())
    return Hypervector(Mode.INTEGER, a.dim, -a.data)


def similarity(a: Hypervector, b: Hypervector) -> SimilarityValue:
    """Normalized Hamming distance (binary) or cosine similarity (integer)."""
    _check_pair(a, b)
    if a.mode is Mode.BINARY:
        differing = int(np.bitwise_count(np.bitwise_xor(a.data, b.data)).sum())
        return SimilarityValue(differing / a.dim, Metric.NORMALIZED_HAMMING)
    av = a.data.astype(np.float64)
    bv = b.data.astype(np.float64)
    na = np.linalg.norm(av)
    nb = np.linalg.norm(bv)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity of an all-zero hypervector is undefined")
    return SimilarityValue(float(av @ bv / (na * nb)), Metric.COSINE)


# ---------------------------------------------------------------------------
# Matrix forms of the same operations, used by the clustering hot loops.
# ---------------------------------------------------------------------------


def pack_bit_matrix(bits: np.ndarray) -> np.ndarray:
    """Pack an (N, d) 0/1 matrix into (N, ceil(d/8)) bytes, row-wise."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), axis=1)

def unpack_bit_matrix(packed: np.ndarray, dim: int) -> np.ndarray:
    return np.unpackbits(packed, axis=1)[:, :dim]


def stack_packed(vs: list[Hypervector]) -> np.ndarray:
    """Stack binary hypervectors into one packed (N, bytes) matrix."""
    return np.stack([v.data for v in vs])


def stack_values(vs: list[Hypervector]) -> np.ndarray:
    """Stack integer hypervectors into one (N, d) int64 matrix."""
    return np.stack([v.data for v in vs])


def hamming_matrix(a_packed: np.ndarray, b_packed: np.ndarray, dim: int,
                   chunk_bytes: int = 1 << 26) -> np.ndarray:
    """Normalized Hamming distances between all rows of two packed matrices.

    Direct XOR + popcount, chunked over rows of ``a_packed`` to bound the
    size of the intermediate (chunk, NB, bytes) tensor. Exact integer math.
    """
    a_packed = np.atleast_2d(a_packed)
    b_packed = np.atleast_2d(b_packed)
    na, width = a_packed.shape
    nb = b_packed.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    rows_per_chunk = max(1, chunk_bytes // max(1, nb * width))
    for start in range(0, na, rows_per_chunk):
        stop = min(start + rows_per_chunk, na)
        xor = np.bitwise_xor(a_packed[start:stop, None, :], b_packed[None, :, :])
        out[start:stop] = np.bitwise_count(xor).sum(axis=2, dtype=np.int64)
    return out / dim


def pairwise_hamming(packed: np.ndarray, dim: int) -> np.ndarray:
    """All-pairs normalized Hamming distances of one packed matrix.

    Uses popcount(x^y) = pop(x) + pop(y) - 2*(x.y) on the unpacked bits with
    a float32 matmul. All intermediate values are integers below 2**24, so
    the BLAS product is exact and the result matches hamming_matrix bit for
    bit; it is just much faster for the N x N case.
    """
    bits = unpack_bit_matrix(packed, dim).astype(np.float32)
    ones = bits.sum(axis=1)
    gram = bits @ bits.T
    dist = ones[:, None] + ones[None, :] - 2.0 * gram
    return dist.astype(np.float64) / dim


def cosine_matrix(a_values: np.ndarray, b_values: np.ndarray) -> np.ndarray:
    """Cosine similarities between all rows of two integer matrices.

    Rows with zero norm yield -inf (they can never win an assignment);
    callers that need to forbid zero vectors check norms themselves.
    """
    a = np.atleast_2d(a_values).astype(np.float64)
    b = np.atleast_2d(b_values).astype(np.float64)
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    gram = a @ b.T
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = gram / (na[:, None] * nb[None, :])
    sims[np.isnan(sims) | np.isinf(sims)] = -np.inf
    return sims


def pairwise_cosine(values: np.ndarray) -> np.ndarray:
    return cosine_matrix(values, values)
