"""Quantization and query-hypervector encoding.

A sample row is quantized feature-by-feature onto q levels, then folded
into a single query hypervector one of two ways:

* record encoding — bind each feature's level hypervector to that feature's
  ID hypervector, then bundle the n results;
* n-gram encoding — permute each feature's level hypervector by its feature
  position (0 shifts for the first feature), then bundle.

``encode_dataset`` is the batch entry point; it is algebraically identical
to calling the row encoders one sample at a time but works on whole
matrices. Majority tie-break bits come from streams keyed by (run seed,
row level pattern): identical rows encode identically, and the output does
not depend on encoding order or subsetting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .datasets import RawDataset
from .errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidQuantization,
    ModeMismatch,
    NonFiniteFeature,
)
from .hv import (
    Hypervector,
    Mode,
    bind,
    bundle,
    pack_bit_matrix,
    permute,
    unpack_bit_matrix,
)
from .rng import ENCODE_TIES, RngStream, content_key
from .seeds import SeedSet, make_seed_set


class EncodingKind(enum.Enum):
    RECORD = "record"
    NGRAM = "ngram"


@dataclass(frozen=True)
class EncodingConfig:
    encoding: EncodingKind
    mode: Mode
    dim: int = 10000
    q: int = 16
    seed: int = 0


@dataclass(frozen=True)
class EncodedDataset:
    """Query hypervectors plus ground truth for one encoded dataset."""

    queries: list[Hypervector]
    labels: np.ndarray
    encoding: EncodingKind
    mode: Mode
    q: int
    source: str
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)
    _bits: np.ndarray | None = field(default=None, repr=False, compare=False)
    _bits_f32: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.queries:
            raise EmptyInput("EncodedDataset needs at least one query")
        if len(self.queries) != len(self.labels):
            raise DimensionMismatch("queries and labels lengths differ")

    @property
    def n_samples(self) -> int:
        return len(self.queries)

    @property
    def dim(self) -> int:
        return self.queries[0].dim

    def query_matrix(self) -> np.ndarray:
        """Stacked query payloads: packed bytes (binary) or int64 (integer).

        Cached; every clustering loop works on this one matrix.
        """
        if self._matrix is None:
            stacked = np.stack([v.data for v in self.queries])
            stacked.flags.writeable = False
            object.__setattr__(self, "_matrix", stacked)
        return self._matrix

    def bit_matrix(self) -> np.ndarray:
        """Unpacked (N, dim) 0/1 matrix; binary mode only. Cached because
        center regeneration walks it every refinement iteration."""
        if self.mode is not Mode.BINARY:
            raise ModeMismatch("bit_matrix() is only defined for binary mode")
        if self._bits is None:
            bits = unpack_bit_matrix(self.query_matrix(), self.dim)
            bits.flags.writeable = False
            object.__setattr__(self, "_bits", bits)
        return self._bits

    def float_bits(self) -> np.ndarray:
        """bit_matrix() as float32, cached; feeds the exact-matmul Hamming
        fast path in the assignment loop."""
        if self._bits_f32 is None:
            f32 = self.bit_matrix().astype(np.float32)
            f32.flags.writeable = False
            object.__setattr__(self, "_bits_f32", f32)
        return self._bits_f32


def quantize(dataset: RawDataset, q: int) -> np.ndarray:
    """Per-feature linear min-max quantization onto level indices in [1, q].

    A value at the column minimum maps to level 1, at the maximum to level
    q; constant columns map to level 1 everywhere.
    """
    if q < 2:
        raise InvalidQuantization(f"q must be at least 2, got {q}")
    samples = dataset.samples
    if not np.all(np.isfinite(samples)):
        raise NonFiniteFeature(f"{dataset.name}: non-finite feature values")
    mn = samples.min(axis=0)
    mx = samples.max(axis=0)
    span = mx - mn
    levels = np.ones(samples.shape, dtype=np.int64)
    varying = span > 0
    scaled = np.floor(
        (samples[:, varying] - mn[varying]) / span[varying] * q
    ).astype(np.int64)
    levels[:, varying] = np.clip(scaled, 0, q - 1) + 1
    return levels


def row_tie_breaker(levels_row, seed: int) -> RngStream:
    """The tie-break stream a given quantized row uses under ``seed``."""
    return RngStream(seed).child(ENCODE_TIES, *content_key(levels_row))


def encode_record(levels_row, seeds: SeedSet, tie_breaker: RngStream | None = None) -> Hypervector:
    """Encode one quantized row: bundle over bind(level_j, id_j).

    ``tie_breaker`` defaults to the row's content-keyed stream, matching
    what encode_dataset uses.
    """
    levels_row = np.asarray(levels_row, dtype=np.int64)
    _check_row(levels_row, seeds, need_ids=True)
    if tie_breaker is None:
        tie_breaker = row_tie_breaker(levels_row, seeds.seed)
    bound = [bind(seeds.levels[lv - 1], seeds.ids[j]) for j, lv in enumerate(levels_row)]
    return bundle(bound, tie_breaker=tie_breaker)


def encode_ngram(levels_row, seeds: SeedSet, tie_breaker: RngStream | None = None) -> Hypervector:
    """Encode one quantized row: bundle over the position-permuted levels."""
    levels_row = np.asarray(levels_row, dtype=np.int64)
    _check_row(levels_row, seeds, need_ids=False)
    if tie_breaker is None:
        tie_breaker = row_tie_breaker(levels_row, seeds.seed)
    shifted = [permute(seeds.levels[lv - 1], j) for j, lv in enumerate(levels_row)]
    return bundle(shifted, tie_breaker=tie_breaker)


def _check_row(levels_row: np.ndarray, seeds: SeedSet, need_ids: bool):
    if levels_row.ndim != 1 or levels_row.size == 0:
        raise EmptyInput("levels_row must be a nonempty 1-d sequence")
    if need_ids and levels_row.size > len(seeds.ids):
        raise DimensionMismatch(
            f"row has {levels_row.size} features but SeedSet has {len(seeds.ids)} ids"
        )
    if levels_row.min() < 1 or levels_row.max() > seeds.q:
        raise DimensionMismatch(
            f"level indices must lie in [1, {seeds.q}]"
        )


def encode_dataset(dataset: RawDataset, config: EncodingConfig) -> EncodedDataset:
    """Quantize and encode every sample; deterministic given config.seed."""
    if dataset.n_samples == 0:
        raise EmptyInput("cannot encode an empty dataset")
    seeds = make_seed_set(
        config.seed, dataset.n_features, config.q, config.dim, config.mode
    )
    levels = quantize(dataset, config.q)
    if config.mode is Mode.BINARY:
        queries, matrix = _encode_binary(levels, seeds, config)
    else:
        queries, matrix = _encode_integer(levels, seeds, config)
    return EncodedDataset(
        queries=queries,
        labels=dataset.labels.copy(),
        encoding=config.encoding,
        mode=config.mode,
        q=config.q,
        source=dataset.name,
        _matrix=matrix,
    )


def _encode_binary(levels, seeds, config):
    n_rows, n_features = levels.shape
    dim = config.dim
    level_bits = np.stack([v.bits() for v in seeds.levels])
    if config.encoding is EncodingKind.RECORD:
        id_bits = np.stack([v.bits() for v in seeds.ids])
    counts = np.zeros((n_rows, dim), dtype=np.int32)
    for j in range(n_features):
        selected = level_bits[levels[:, j] - 1]
        if config.encoding is EncodingKind.RECORD:
            counts += np.bitwise_xor(selected, id_bits[j])
        else:
            counts += np.roll(selected, j, axis=1)
    bits = (2 * counts > n_features).astype(np.uint8)
    if n_features % 2 == 0:
        tied = 2 * counts == n_features
        for i in range(n_rows):
            tie_bits = row_tie_breaker(levels[i], config.seed).bits(dim)
            bits[i, tied[i]] = tie_bits[tied[i]]
    packed = pack_bit_matrix(bits)
    packed.flags.writeable = False
    queries = [Hypervector(Mode.BINARY, dim, packed[i]) for i in range(n_rows)]
    return queries, packed


def _encode_integer(levels, seeds, config):
    n_rows, n_features = levels.shape
    dim = config.dim
    level_vals = np.stack([v.data for v in seeds.levels]).astype(np.int32)
    if config.encoding is EncodingKind.RECORD:
        id_vals = np.stack([v.data for v in seeds.ids]).astype(np.int32)
    acc = np.zeros((n_rows, dim), dtype=np.int32)
    for j in range(n_features):
        selected = level_vals[levels[:, j] - 1]
        if config.encoding is EncodingKind.RECORD:
            acc += selected * id_vals[j]
        else:
            acc += np.roll(selected, j, axis=1)
    matrix = acc.astype(np.int64)
    matrix.flags.writeable = False
    queries = [Hypervector(Mode.INTEGER, dim, matrix[i]) for i in range(n_rows)]
    return queries, matrix
