"""Clustering in hyperdimensional space.

The iterative framework alternates two steps: assign every query
hypervector to the most similar cluster hypervector, then rebuild each
cluster hypervector as the bundle of its members. What distinguishes the
algorithms is initialization:

* ``init_hdcluster``   -- k random hypervectors (the non-robust baseline);
* ``init_sb_kmeans``   -- 1-d k-means over the similarity profile against a
                          random anchor sample;
* ``init_bin_width``   -- k equal-width bins over that profile, empty bins
                          becoming random centers;
* ``init_bin_height``  -- k equal-occupancy groups of the sorted profile;
* ``init_sb_affinity`` -- affinity propagation over the full pairwise query
                          similarity matrix.

All randomness flows through the run's RngStream children, so a run is a
pure function of (data, configuration, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classic import ApConfig, ApResult, affinity_propagation, kmeans
from .encoding import EncodedDataset
from .errors import InsufficientSamples, TieBreakRequired
from .hv import (
    Hypervector,
    Mode,
    cosine_matrix,
    hamming_matrix,
    pairwise_cosine,
    pairwise_hamming,
    stack_packed,
    stack_values,
    unpack_bit_matrix,
)
from .rng import REGEN_TIES, RngStream
from .seeds import generate_random_hvs


@dataclass(frozen=True)
class RefinementConfig:
    """Stopping rules for the iterative center update."""

    max_iterations: int = 300
    cosine_threshold: float = 0.99
    hamming_threshold: float = 0.01
    one_pass: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 < self.cosine_threshold < 1 or not 0 < self.hamming_threshold < 1:
            raise ValueError("thresholds must lie in (0, 1)")


@dataclass(frozen=True)
class ClusterModel:
    """Final centers and assignments of one clustering run.

    ``trace`` holds the per-iteration center-change metric (max normalized
    Hamming between consecutive centers for binary mode, min cosine for
    integer mode). ``had_zero_center`` flags that an all-zero integer center
    appeared; such a center loses every assignment by convention.
    """

    centers: list[Hypervector]
    assignments: np.ndarray
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)
    had_zero_center: bool = False

    @property
    def k(self) -> int:
        return len(self.centers)


def _centers_matrix(centers: list[Hypervector], mode: Mode) -> np.ndarray:
    return stack_packed(centers) if mode is Mode.BINARY else stack_values(centers)


def assign(queries: EncodedDataset, centers: list[Hypervector]) -> np.ndarray:
    """Map each query to its most similar center (ties to the lowest index)."""
    assignments, _ = _assign(queries, _centers_matrix(centers, queries.mode))
    return assignments


def _assign(queries: EncodedDataset, center_matrix):
    """Argbest centers for every query.

    Binary: rank by popcount(q) + popcount(c) - 2 q.c; the query term is
    constant per row, so argmin of popcount(c) - 2 q.c over centers equals
    argmin of Hamming distance exactly (all quantities are integers below
    2**24, so the float32 matmul is exact). Integer: argmax of cosine; the
    query norm is again constant per row, so it divides out.
    """
    if queries.mode is Mode.BINARY:
        center_bits = unpack_bit_matrix(center_matrix, queries.dim).astype(np.float32)
        center_ones = center_bits.sum(axis=1)
        scores = center_ones[None, :] - 2.0 * (queries.float_bits() @ center_bits.T)
        return scores.argmin(axis=1), False
    center_values = center_matrix.astype(np.float64)
    norms = np.linalg.norm(center_values, axis=1)
    had_zero = bool(np.any(norms == 0.0))
    gram = queries.query_matrix().astype(np.float64) @ center_values.T
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = gram / norms[None, :]
    scores[:, norms == 0.0] = -np.inf
    return scores.argmax(axis=1), had_zero


def regenerate(
    queries: EncodedDataset,
    assignments,
    previous_centers: list[Hypervector] | None = None,
    *,
    k: int | None = None,
    ties: RngStream | None = None,
    fill: RngStream | None = None,
) -> list[Hypervector]:
    """Rebuild each center as the bundle of its member queries.

    Empty clusters keep ``previous_centers[c]`` when given; at
    initialization (no previous centers) they take fresh random
    hypervectors from ``fill``. Binary majority ties consume ``ties``
    sequentially, cluster 0 upward, one block of dim bits per even-sized
    cluster; every call draws fresh bits, so a tied dimension re-randomizes
    each iteration (the cost of that is visible in the convergence
    behavior of the baseline, which is the point).
    """
    if k is None:
        if previous_centers is None:
            raise ValueError("pass k when previous_centers is None")
        k = len(previous_centers)
    assignments = np.asarray(assignments, dtype=np.int64)
    mode, dim = queries.mode, queries.dim
    sizes = np.bincount(assignments, minlength=k)
    order = np.argsort(assignments, kind="stable")
    if mode is Mode.BINARY:
        sorted_rows = queries.bit_matrix()[order]
    else:
        sorted_rows = queries.query_matrix()[order]
    centers: list[Hypervector] = []
    start = 0
    for c in range(k):
        size = int(sizes[c])
        if size == 0:
            centers.append(_empty_center(c, previous_centers, fill, dim, mode))
            continue
        block = sorted_rows[start : start + size]
        start += size
        if mode is Mode.BINARY:
            counts = block.sum(axis=0, dtype=np.int64)
            bits = (2 * counts > size).astype(np.uint8)
            if size % 2 == 0:
                tied = 2 * counts == size
                if ties is not None:
                    tie_bits = ties.bits(dim)
                    bits[tied] = tie_bits[tied]
                elif np.any(tied):
                    raise TieBreakRequired(
                        f"cluster {c} has an even member count and tied bits; "
                        "pass the run's tie stream"
                    )
            centers.append(Hypervector(Mode.BINARY, dim, np.packbits(bits)))
        else:
            centers.append(
                Hypervector(Mode.INTEGER, dim, block.sum(axis=0, dtype=np.int64))
            )
    return centers


def _empty_center(c, previous_centers, fill, dim, mode):
    if previous_centers is not None:
        return previous_centers[c]
    if fill is None:
        raise ValueError("empty cluster with neither previous centers nor fill stream")
    return generate_random_hvs(fill, 1, dim, mode)[0]


def _center_change(old: list[Hypervector], new: list[Hypervector], mode: Mode, dim: int) -> float:
    """Max normalized Hamming (binary) or min cosine (integer) across clusters."""
    old_m = _centers_matrix(old, mode)
    new_m = _centers_matrix(new, mode)
    if mode is Mode.BINARY:
        xor = np.bitwise_xor(old_m, new_m)
        per_cluster = np.bitwise_count(xor).sum(axis=1, dtype=np.int64) / dim
        return float(per_cluster.max())
    worst = 1.0
    for o, n in zip(old_m, new_m):
        if np.array_equal(o, n):
            continue
        no = np.linalg.norm(o.astype(np.float64))
        nn = np.linalg.norm(n.astype(np.float64))
        if no == 0.0 or nn == 0.0:
            worst = min(worst, 0.0)  # a center switched to/from all-zero
            continue
        cos = float(o.astype(np.float64) @ n.astype(np.float64) / (no * nn))
        worst = min(worst, cos)
    return worst


def refine(
    queries: EncodedDataset,
    initial_centers: list[Hypervector],
    config: RefinementConfig = RefinementConfig(),
    ties: RngStream | None = None,
) -> ClusterModel:
    """Alternate assignment and center regeneration until the centers settle.

    Convergence means every binary center moved less than
    ``hamming_threshold`` (or every integer center kept cosine above
    ``cosine_threshold``) between consecutive iterations. One assign plus
    one regeneration counts as one iteration. With ``one_pass`` the single
    assignment against the initial centers is the final answer.

    ``ties`` is the run's sequential tie-break stream; pass the same stream
    object that built the initial centers so the run consumes one stream in
    one documented order.
    """
    centers = list(initial_centers)
    mode, dim = queries.mode, queries.dim
    trace: list[float] = []
    had_zero = False

    if config.one_pass:
        assignments, zero = _assign(queries, _centers_matrix(centers, mode))
        return ClusterModel(
            centers=centers,
            assignments=assignments,
            iterations=1,
            converged=True,
            trace=trace,
            had_zero_center=zero,
        )

    assignments = np.empty(0, dtype=np.int64)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        assignments, zero = _assign(queries, _centers_matrix(centers, mode))
        had_zero = had_zero or zero
        new_centers = regenerate(queries, assignments, centers, ties=ties)
        change = _center_change(centers, new_centers, mode, dim)
        trace.append(change)
        centers = new_centers
        if mode is Mode.BINARY:
            converged = change < config.hamming_threshold
        else:
            converged = change > config.cosine_threshold
        if converged:
            break
    return ClusterModel(
        centers=centers,
        assignments=assignments,
        iterations=iterations,
        converged=converged,
        trace=trace,
        had_zero_center=had_zero,
    )


def init_hdcluster(k: int, dim: int, mode: Mode, rng: RngStream) -> list[Hypervector]:
    """Baseline initialization: k random hypervectors from the data space."""
    return generate_random_hvs(rng, k, dim, mode)


def similarity_profile(queries: EncodedDataset, anchor_index: int) -> np.ndarray:
    """Similarity of every query against the anchor query.

    The anchor participates with its analytic self-similarity (0 Hamming,
    1 cosine) so all N samples take part in the downstream 1-d clustering.
    """
    n = queries.n_samples
    if not 0 <= anchor_index < n:
        raise IndexError(f"anchor_index {anchor_index} outside [0, {n})")
    matrix = queries.query_matrix()
    if queries.mode is Mode.BINARY:
        profile = hamming_matrix(
            matrix[anchor_index : anchor_index + 1], matrix, queries.dim
        )[0]
        profile[anchor_index] = 0.0
    else:
        profile = cosine_matrix(matrix[anchor_index : anchor_index + 1], matrix)[0]
        profile[anchor_index] = 1.0
    return profile


def _pick_anchor(queries: EncodedDataset, algo: RngStream) -> int:
    return algo.integer(0, queries.n_samples)


def init_sb_kmeans(queries: EncodedDataset, k: int, algo: RngStream) -> np.ndarray:
    """1-d k-means over the similarity profile of a random anchor."""
    if queries.n_samples < k:
        raise InsufficientSamples(f"N={queries.n_samples} < k={k}")
    anchor = _pick_anchor(queries, algo)
    profile = similarity_profile(queries, anchor)
    result = kmeans(profile[:, None], k, algo)
    return result.assignments


def width_bin_assignments(profile: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Split [min, max] of a scalar profile into k equal-width bins.

    Returns (bin per sample, mask of zero-membered bins). A degenerate
    profile (max == min) collapses into bin 0, leaving k - 1 empty bins.
    """
    profile = np.asarray(profile, dtype=np.float64)
    lo, hi = float(profile.min()), float(profile.max())
    if hi == lo:
        assignments = np.zeros(profile.size, dtype=np.int64)
    else:
        scaled = np.floor((profile - lo) / (hi - lo) * k).astype(np.int64)
        assignments = np.clip(scaled, 0, k - 1)
    empty_mask = np.bincount(assignments, minlength=k) == 0
    return assignments, empty_mask


def height_group_assignments(profile: np.ndarray, k: int) -> np.ndarray:
    """Cut the sorted profile into k contiguous near-equal groups.

    The first (N mod k) groups take ceil(N/k) members, the rest floor(N/k);
    ties in profile values keep stable input order.
    """
    profile = np.asarray(profile, dtype=np.float64)
    n = profile.size
    order = np.argsort(profile, kind="stable")
    base, extra = divmod(n, k)
    assignments = np.empty(n, dtype=np.int64)
    start = 0
    for g in range(k):
        size = base + (1 if g < extra else 0)
        assignments[order[start : start + size]] = g
        start += size
    return assignments


def init_bin_width(queries: EncodedDataset, k: int, algo: RngStream):
    """k equal-width bins over the profile range of a random anchor.

    Returns (assignments, empty_mask); clusters flagged empty have no
    members and get fresh random centers when the initial centers are
    built.
    """
    anchor = _pick_anchor(queries, algo)
    profile = similarity_profile(queries, anchor)
    return width_bin_assignments(profile, k)


def init_bin_height(queries: EncodedDataset, k: int, algo: RngStream) -> np.ndarray:
    """k near-equal contiguous groups of the sorted profile of a random anchor."""
    n = queries.n_samples
    if n < k:
        raise InsufficientSamples(f"N={n} < k={k}")
    anchor = _pick_anchor(queries, algo)
    profile = similarity_profile(queries, anchor)
    return height_group_assignments(profile, k)


def init_sb_affinity(
    queries: EncodedDataset, ap_config: ApConfig = ApConfig()
) -> tuple[np.ndarray, ApResult]:
    """Affinity propagation over the full pairwise query similarity matrix.

    Binary queries feed negated Hamming distances (larger = more similar);
    integer queries feed cosine similarities. The exemplar count, not k,
    determines how many initial clusters emerge.
    """
    if queries.n_samples < 2:
        raise InsufficientSamples("similarity-based affinity propagation needs N >= 2")
    matrix = queries.query_matrix()
    if queries.mode is Mode.BINARY:
        sims = -pairwise_hamming(matrix, queries.dim)
    else:
        sims = pairwise_cosine(matrix)
        np.fill_diagonal(sims, 1.0)
    result = affinity_propagation(sims, ap_config)
    return result.assignments, result
