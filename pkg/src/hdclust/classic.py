"""Traditional clustering: k-means, bottom-up hierarchical, affinity propagation.

These serve double duty: baselines over raw feature matrices, and the
scalar/matrix machinery the hyperspace algorithms reuse (1-d k-means over a
similarity profile, affinity propagation over a query similarity matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamples
from .rng import RngStream


@dataclass(frozen=True)
class KMeansResult:
    assignments: np.ndarray
    centers: np.ndarray
    objective: float  # sum of squared distances to assigned centers
    iterations: int
    objective_trace: list[float] = field(compare=False)


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # |x|^2 + |c|^2 - 2 x.c instead of materializing an (N, k, D) difference
    # tensor; encoded hypervector matrices make the latter enormous.
    p2 = np.einsum("nd,nd->n", points, points)
    c2 = np.einsum("kd,kd->k", centers, centers)
    d2 = p2[:, None] + c2[None, :] - 2.0 * (points @ centers.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _kmeans_pp_init(points: np.ndarray, k: int, rng: RngStream) -> np.ndarray:
    """Seeded k-means++: first center uniform, the rest weighted by squared
    distance to the nearest chosen center. Falls back to a uniform pick over
    unchosen points when every candidate distance is zero (duplicates)."""
    n = points.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integer(0, n)
    closest = _squared_distances(points, points[chosen[:1]]).ravel()
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            target = rng.uniform() * total
            idx = int(np.searchsorted(np.cumsum(closest), target, side="right"))
            idx = min(idx, n - 1)
        else:
            remaining = np.setdiff1d(np.arange(n), chosen[:c])
            idx = int(remaining[rng.integer(0, len(remaining))])
        chosen[c] = idx
        dist_new = _squared_distances(points, points[idx : idx + 1]).ravel()
        closest = np.minimum(closest, dist_new)
    return points[chosen].copy()


def kmeans(points, k: int, rng: RngStream, max_iterations: int = 300,
           rel_tol: float = 1e-9) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding.

    Assignment ties break to the lowest center index; empty clusters keep
    their previous center. Stops when assignments stop changing, when the
    objective's relative change drops below ``rel_tol``, or at
    ``max_iterations``. The objective is checked to be non-increasing on
    every run.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = points.shape[0]
    if not 1 <= k <= n:
        raise InsufficientSamples(f"need 1 <= k <= {n}, got k={k}")
    centers = _kmeans_pp_init(points, k, rng)
    assignments = np.full(n, -1, dtype=np.int64)
    trace: list[float] = []
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        d2 = _squared_distances(points, centers)
        new_assignments = d2.argmin(axis=1)
        objective = float(d2[np.arange(n), new_assignments].sum())
        if trace and objective > trace[-1] * (1 + 1e-12) + 1e-12:
            raise AssertionError("k-means objective increased")
        unchanged = bool(np.array_equal(new_assignments, assignments))
        assignments = new_assignments
        converged_phi = bool(
            trace and abs(trace[-1] - objective) <= rel_tol * max(trace[-1], 1e-300)
        )
        trace.append(objective)
        if unchanged or converged_phi:
            break
        for c in range(k):
            members = assignments == c
            if members.any():
                centers[c] = points[members].mean(axis=0)
    return KMeansResult(
        assignments=assignments,
        centers=centers,
        objective=trace[-1],
        iterations=iterations,
        objective_trace=trace,
    )


def hierarchical(points, k: int) -> np.ndarray:
    """Bottom-up merging with mean representatives.

    Starts from singletons; each step merges the pair of clusters whose
    representatives are closest (ties to the lexicographically lowest index
    pair), and the merged cluster's representative is the mean of all its
    constituent points. Exactly N - k merges happen.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = points.shape[0]
    if not 1 <= k <= n:
        raise InsufficientSamples(f"need 1 <= k <= {n}, got k={k}")
    reps = points.copy()
    members: list[list[int]] = [[i] for i in range(n)]
    alive = np.ones(n, dtype=bool)
    d2 = _squared_distances(reps, reps)
    np.fill_diagonal(d2, np.inf)
    for _ in range(n - k):
        flat = int(np.argmin(np.where(alive[:, None] & alive[None, :], d2, np.inf)))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        members[i] = members[i] + members[j]
        alive[j] = False
        reps[i] = points[members[i]].mean(axis=0)
        diff = reps - reps[i]
        row = np.einsum("nd,nd->n", diff, diff)
        d2[i, :] = row
        d2[:, i] = row
        d2[i, i] = np.inf
    assignments = np.empty(n, dtype=np.int64)
    for dense_id, root in enumerate(np.flatnonzero(alive)):
        assignments[members[root]] = dense_id
    return assignments


@dataclass(frozen=True)
class ApConfig:
    """Affinity propagation knobs. preference=None uses the median of the
    off-diagonal similarities."""

    damping: float = 0.9
    max_iterations: int = 1000
    convergence_window: int = 50
    preference: float | None = None

    def __post_init__(self):
        if not 0.5 <= self.damping < 1.0:
            raise ValueError(f"damping must lie in [0.5, 1), got {self.damping}")
        if self.max_iterations < 1 or self.convergence_window < 1:
            raise ValueError("max_iterations and convergence_window must be >= 1")


@dataclass(frozen=True)
class ApResult:
    exemplars: np.ndarray  # indices of elected exemplars
    assignments: np.ndarray  # dense cluster id per point, 0..len(exemplars)-1
    converged: bool
    iterations: int
    fallback: bool = False  # no exemplar emerged; degenerate single-exemplar rescue


def affinity_propagation(similarity: np.ndarray, config: ApConfig = ApConfig()) -> ApResult:
    """Frey-Dueck message passing over a similarity matrix (larger = closer).

    Responsibilities and availabilities are damped as
    new = damping * old + (1 - damping) * computed. Points k with
    r(k,k) + a(k,k) > 0 become exemplars; convergence means the exemplar set
    held still for ``convergence_window`` consecutive iterations. If no
    exemplar ever emerges, the single point with maximal total incoming
    similarity is elected instead and the result is flagged.
    """
    s = np.array(similarity, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("similarity matrix must be square")
    n = s.shape[0]
    if n < 2:
        raise InsufficientSamples("affinity propagation needs at least 2 points")
    off_diag = s[~np.eye(n, dtype=bool)]
    preference = config.preference
    if preference is None:
        preference = float(np.median(off_diag))
    np.fill_diagonal(s, preference)

    r = np.zeros((n, n))
    a = np.zeros((n, n))
    lam = config.damping
    idx = np.arange(n)
    stable_for = 0
    previous_exemplars: np.ndarray | None = None
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        # responsibilities
        a_plus_s = a + s
        first = a_plus_s.argmax(axis=1)
        first_val = a_plus_s[idx, first]
        a_plus_s[idx, first] = -np.inf
        second_val = a_plus_s.max(axis=1)
        r_new = s - first_val[:, None]
        r_new[idx, first] = s[idx, first] - second_val
        r = lam * r + (1 - lam) * r_new
        # availabilities
        r_pos = np.maximum(r, 0)
        r_pos[idx, idx] = r[idx, idx]
        col_sums = r_pos.sum(axis=0)
        a_new = np.minimum(0.0, col_sums[None, :] - r_pos)
        a_new[idx, idx] = col_sums - r[idx, idx]
        a = lam * a + (1 - lam) * a_new
        exemplars = np.flatnonzero(np.diag(r) + np.diag(a) > 0)
        if previous_exemplars is not None and np.array_equal(exemplars, previous_exemplars):
            stable_for += 1
        else:
            stable_for = 0
        previous_exemplars = exemplars
        if len(exemplars) > 0 and stable_for >= config.convergence_window:
            converged = True
            break

    fallback = False
    exemplars = previous_exemplars if previous_exemplars is not None else np.array([], dtype=np.int64)
    if len(exemplars) == 0:
        fallback = True
        exemplars = np.array([int(s.sum(axis=0).argmax())], dtype=np.int64)
    assignments = s[:, exemplars].argmax(axis=1)
    assignments[exemplars] = np.arange(len(exemplars))
    return ApResult(
        exemplars=np.asarray(exemplars, dtype=np.int64),
        assignments=assignments.astype(np.int64),
        converged=converged,
        iterations=iterations,
        fallback=fallback,
    )
