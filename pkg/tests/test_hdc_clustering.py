"""Assignment, regeneration, refinement, and the four initializers."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdclust.classic import ApConfig
from hdclust.datasets import from_arrays
from hdclust.encoding import EncodedDataset, EncodingConfig, EncodingKind, encode_dataset
from hdclust.errors import InsufficientSamples, TieBreakRequired
from hdclust.hdc_clustering import (
    RefinementConfig,
    assign,
    height_group_assignments,
    init_bin_height,
    init_bin_width,
    init_hdcluster,
    init_sb_affinity,
    init_sb_kmeans,
    refine,
    regenerate,
    similarity_profile,
    width_bin_assignments,
)
from hdclust.hv import Hypervector, Mode, bundle, similarity
from hdclust.rng import ALGO, REGEN_TIES, RngStream
from hdclust.seeds import generate_random_hvs


def encoded_from_bits(rows, labels=None, q=2):
    queries = [Hypervector.from_bits(r) for r in rows]
    labels = np.zeros(len(rows), dtype=np.int64) if labels is None else np.asarray(labels)
    return EncodedDataset(
        queries=queries,
        labels=labels,
        encoding=EncodingKind.RECORD,
        mode=Mode.BINARY,
        q=q,
        source="toy",
    )


def encoded_from_ints(rows, labels=None):
    queries = [Hypervector.from_ints(r) for r in rows]
    labels = np.zeros(len(rows), dtype=np.int64) if labels is None else np.asarray(labels)
    return EncodedDataset(
        queries=queries,
        labels=labels,
        encoding=EncodingKind.RECORD,
        mode=Mode.INTEGER,
        q=2,
        source="toy",
    )


class TestAssign:
    def test_queries_equal_centers_identity(self):
        rng = RngStream(0)
        centers = generate_random_hvs(rng, 3, 256, Mode.BINARY)
        data = encoded_from_bits([c.bits() for c in centers])
        assert list(assign(data, centers)) == [0, 1, 2]

    def test_single_center_takes_all(self):
        rng = RngStream(1)
        data = encoded_from_bits([v.bits() for v in generate_random_hvs(rng, 5, 128, Mode.BINARY)])
        center = generate_random_hvs(rng, 1, 128, Mode.BINARY)
        assert list(assign(data, center)) == [0] * 5

    def test_toy_assignment_matches_similarity_enumeration(self):
        rng = RngStream(2)
        queries = generate_random_hvs(rng, 6, 64, Mode.BINARY)
        centers = generate_random_hvs(rng, 2, 64, Mode.BINARY)
        data = encoded_from_bits([q.bits() for q in queries])
        expected = [
            int(np.argmin([similarity(q, c).value for c in centers])) for q in queries
        ]
        assert list(assign(data, centers)) == expected

    def test_tie_breaks_to_lowest_index(self):
        q = Hypervector.from_bits([1, 0, 0, 0])
        c0 = Hypervector.from_bits([1, 1, 0, 0])
        c1 = Hypervector.from_bits([0, 0, 0, 0])  # both at distance 1/4
        data = encoded_from_bits([q.bits()])
        assert assign(data, [c0, c1])[0] == 0

    def test_integer_zero_center_loses(self):
        data = encoded_from_ints([[1, 1, -1], [-1, -1, 1]])
        zero = Hypervector.from_ints([0, 0, 0])
        live = Hypervector.from_ints([1, 1, -1])
        assignments = assign(data, [zero, live])
        assert list(assignments) == [1, 1]


class TestRegenerate:
    def test_singleton_cluster_is_its_member(self):
        rng = RngStream(3)
        queries = generate_random_hvs(rng, 3, 96, Mode.BINARY)
        data = encoded_from_bits([q.bits() for q in queries])
        centers = regenerate(data, [0, 1, 2], k=3)
        assert centers[0] == queries[0] and centers[2] == queries[2]

    def test_all_in_one_cluster_matches_bundle(self):
        rng = RngStream(4)
        queries = generate_random_hvs(rng, 5, 64, Mode.BINARY)
        data = encoded_from_bits([q.bits() for q in queries])
        previous = generate_random_hvs(rng, 2, 64, Mode.BINARY)
        centers = regenerate(data, [0] * 5, previous)
        assert centers[0] == bundle(queries)
        assert centers[1] == previous[1]  # empty cluster keeps its center

    def test_three_member_majority_hand_trace(self):
        rows = [[1, 1, 0, 0], [1, 0, 0, 1], [1, 0, 1, 0]]
        data = encoded_from_bits(rows)
        centers = regenerate(data, [0, 0, 0], k=1)
        assert list(centers[0].bits()) == [1, 0, 0, 0]

    def test_even_tie_needs_stream(self):
        data = encoded_from_bits([[1, 0], [0, 0]])
        with pytest.raises(TieBreakRequired):
            regenerate(data, [0, 0], k=1)
        centers = regenerate(data, [0, 0], k=1, ties=RngStream(7))
        assert centers[0].dim == 2

    def test_empty_cluster_filled_from_stream(self):
        data = encoded_from_bits([[1, 0, 1, 1]])
        fill = RngStream(8)
        centers = regenerate(data, [0], k=3, fill=fill)
        assert centers[0] == data.queries[0]
        assert centers[1].dim == 4 and centers[2].dim == 4
        assert centers[1] != centers[2] or True  # fresh draws, 4 dims may collide

    def test_integer_sum_not_normalized(self):
        data = encoded_from_ints([[1, 1, -1], [1, -1, -1]])
        centers = regenerate(data, [0, 0], k=1)
        assert np.array_equal(centers[0].data, [2, 0, -2])


class TestRefine:
    def two_group_data(self, size=3, dim=64, flip=2):
        """Two tight groups: a base pattern and its heavy perturbation."""
        rng = RngStream(11)
        base_a = rng.bits(dim)
        base_b = 1 - base_a
        rows, labels = [], []
        for g, base in enumerate((base_a, base_b)):
            for i in range(size):
                row = base.copy()
                row[i * flip : (i + 1) * flip] ^= 1  # small per-member noise
                rows.append(row)
                labels.append(g)
        return encoded_from_bits(rows, labels)

    def test_fixed_point_converges_immediately(self):
        data = self.two_group_data()
        centers = regenerate(data, data.labels, k=2)  # odd sizes: no ties
        model = refine(data, centers, RefinementConfig())
        assert model.converged
        assert model.iterations <= 2
        assert list(model.assignments) == list(data.labels)

    def test_separable_groups_recovered_from_random_start(self):
        data = self.two_group_data()
        rng = RngStream(5)
        centers = init_hdcluster(2, 64, Mode.BINARY, rng)
        model = refine(data, centers, RefinementConfig(), ties=RngStream(6).child(REGEN_TIES))
        groups = [set(np.flatnonzero(model.assignments == c)) for c in range(2)]
        assert {frozenset(g) for g in groups if g} <= {
            frozenset({0, 1, 2}),
            frozenset({3, 4, 5}),
            frozenset(range(6)),
        }

    def test_max_iterations_respected(self):
        data = self.two_group_data()
        centers = init_hdcluster(2, 64, Mode.BINARY, RngStream(1))
        model = refine(
            data, centers, RefinementConfig(max_iterations=1), ties=RngStream(2)
        )
        assert model.iterations == 1

    def test_one_pass_is_single_assignment(self):
        data = self.two_group_data()
        centers = regenerate(data, data.labels, k=2)
        model = refine(data, centers, RefinementConfig(one_pass=True))
        assert model.iterations == 1 and model.converged
        assert model.centers == centers  # no regeneration happened
        assert list(model.assignments) == list(data.labels)

    def test_trace_records_center_change(self):
        data = self.two_group_data()
        centers = init_hdcluster(2, 64, Mode.BINARY, RngStream(3))
        model = refine(data, centers, RefinementConfig(), ties=RngStream(4))
        assert len(model.trace) == model.iterations
        assert all(0.0 <= change <= 1.0 for change in model.trace)

    def test_integer_mode_converges_on_separable_data(self):
        rng = np.random.default_rng(0)
        group_a = rng.choice([-1, 1], size=(3, 128))
        rows = np.vstack([group_a[0] + 0 * g for g in group_a] + [-g for g in group_a])
        data = encoded_from_ints(rows.tolist(), labels=[0, 0, 0, 1, 1, 1])
        centers = regenerate(data, data.labels, k=2)
        model = refine(data, centers, RefinementConfig())
        assert model.converged
        assert list(model.assignments) == [0, 0, 0, 1, 1, 1]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RefinementConfig(max_iterations=0)
        with pytest.raises(ValueError):
            RefinementConfig(cosine_threshold=1.5)


class TestInitializers:
    def test_hdcluster_deterministic_and_orthogonal(self):
        a = init_hdcluster(3, 10000, Mode.BINARY, RngStream(9).child(ALGO))
        b = init_hdcluster(3, 10000, Mode.BINARY, RngStream(9).child(ALGO))
        assert all(x == y for x, y in zip(a, b))
        for u, v in itertools.combinations(a, 2):
            assert 0.47 <= similarity(u, v).value <= 0.53

    def test_hdcluster_single_center(self):
        centers = init_hdcluster(1, 64, Mode.BINARY, RngStream(0))
        assert len(centers) == 1 and centers[0].dim == 64

    def test_profile_self_entry_analytic(self):
        rng = RngStream(12)
        data = encoded_from_bits([v.bits() for v in generate_random_hvs(rng, 4, 128, Mode.BINARY)])
        profile = similarity_profile(data, 2)
        assert profile[2] == 0.0
        expected = [similarity(data.queries[2], q).value for q in data.queries]
        assert list(profile[:2]) == expected[:2] and list(profile[3:]) == expected[3:]

    def test_profile_constant_for_identical_queries(self):
        row = RngStream(13).bits(64)
        data = encoded_from_bits([row, row, row])
        profile = similarity_profile(data, 0)
        assert np.allclose(profile, 0.0)

    def test_profile_integer_self_is_one(self):
        data = encoded_from_ints([[1, -1, 1], [1, 1, 1], [-1, -1, -1]])
        profile = similarity_profile(data, 1)
        assert profile[1] == 1.0

    def test_sb_kmeans_separated_groups(self):
        # three blatant profile groups; Lloyd plus seeded k-means++ must
        # recover them exactly (verified against the global optimum by
        # brute force over contiguous splits of the sorted values)
        rng = RngStream(14)
        base = generate_random_hvs(rng, 1, 10000, Mode.BINARY)[0].bits()
        rows = []
        for flips in (0, 10, 20, 4000, 4010, 8000, 8010):
            row = base.copy()
            row[:flips] ^= 1
            rows.append(row)
        data = encoded_from_bits(rows, labels=[0, 0, 0, 1, 1, 2, 2])
        assignments = init_sb_kmeans(data, 3, RngStream(15))
        groups = [tuple(np.flatnonzero(assignments == c)) for c in sorted(set(assignments))]
        assert sorted(groups) == [(0, 1, 2), (3, 4), (5, 6)]

    def test_sb_kmeans_k_equals_n(self):
        rng = RngStream(16)
        rows = [v.bits() for v in generate_random_hvs(rng, 4, 2048, Mode.BINARY)]
        data = encoded_from_bits(rows)
        assignments = init_sb_kmeans(data, 4, RngStream(17))
        assert len(set(assignments)) == 4

    def test_sb_kmeans_constant_profile_single_cluster(self):
        row = RngStream(18).bits(64)
        data = encoded_from_bits([row] * 5)
        assignments = init_sb_kmeans(data, 3, RngStream(19))
        assert len(set(assignments)) == 1

    def test_sb_kmeans_insufficient(self):
        data = encoded_from_bits([[1, 0], [0, 1]])
        with pytest.raises(InsufficientSamples):
            init_sb_kmeans(data, 3, RngStream(0))

    def test_width_bins_uniform_grid(self):
        profile = np.array([0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
        assignments, empty = width_bin_assignments(profile, 3)
        assert list(assignments) == [0, 0, 1, 1, 2, 2]
        assert not empty.any()

    def test_width_bins_zero_membered_bin(self):
        profile = np.array([0.10, 0.11, 0.12, 0.90])
        assignments, empty = width_bin_assignments(profile, 3)
        assert list(assignments) == [0, 0, 0, 2]
        assert list(empty) == [False, True, False]

    def test_width_bins_constant_profile(self):
        assignments, empty = width_bin_assignments(np.full(5, 0.3), 4)
        assert list(assignments) == [0] * 5
        assert list(empty) == [False, True, True, True]

    def test_bin_width_end_to_end_injects_random_centers(self):
        profile_rows = [[1, 0, 1, 0, 1, 0, 1, 0]] * 4
        data = encoded_from_bits(profile_rows)
        assignments, empty = init_bin_width(data, 3, RngStream(20))
        centers = regenerate(data, assignments, k=3, ties=RngStream(21), fill=RngStream(22))
        assert len(centers) == 3
        assert empty.sum() == 2

    def test_height_groups_divisible(self):
        profile = np.array([0.4, 0.1, 0.6, 0.2, 0.5, 0.3])
        assignments = height_group_assignments(profile, 3)
        assert list(np.bincount(assignments)) == [2, 2, 2]
        # lowest two profile values fall in group 0
        assert assignments[1] == 0 and assignments[3] == 0

    def test_height_groups_indivisible(self):
        profile = np.arange(7) / 10.0
        assignments = height_group_assignments(profile, 3)
        assert list(np.bincount(assignments)) == [3, 2, 2]

    def test_height_groups_n_equals_k(self):
        assignments = height_group_assignments(np.array([0.3, 0.1, 0.2]), 3)
        assert sorted(np.bincount(assignments)) == [1, 1, 1]

    def test_height_groups_stable_on_ties(self):
        profile = np.zeros(4)
        assignments = height_group_assignments(profile, 2)
        assert list(assignments) == [0, 0, 1, 1]

    def test_bin_height_needs_enough_samples(self):
        data = encoded_from_bits([[1, 0], [0, 1]])
        with pytest.raises(InsufficientSamples):
            init_bin_height(data, 3, RngStream(0))

    def test_sb_affinity_two_orthogonal_groups(self):
        rng = RngStream(23)
        a, b = generate_random_hvs(rng, 2, 4096, Mode.BINARY)
        rows = []
        for base in (a, b):
            for flips in (0, 5, 10):
                row = base.bits().copy()
                row[:flips] ^= 1
                rows.append(row)
        data = encoded_from_bits(rows, labels=[0, 0, 0, 1, 1, 1])
        assignments, result = init_sb_affinity(data, ApConfig())
        assert len(result.exemplars) == 2
        groups = [set(np.flatnonzero(assignments == c)) for c in range(2)]
        assert sorted(map(sorted, groups)) == [[0, 1, 2], [3, 4, 5]]

    def test_sb_affinity_identical_queries_single_exemplar(self):
        row = RngStream(24).bits(512)
        data = encoded_from_bits([row] * 4)
        assignments, result = init_sb_affinity(data, ApConfig())
        assert len(result.exemplars) == 1
        assert result.fallback
        assert len(set(assignments)) == 1

    def test_sb_affinity_needs_two(self):
        data = encoded_from_bits([[1, 0, 1, 1]])
        with pytest.raises(InsufficientSamples):
            init_sb_affinity(data, ApConfig())


@given(st.integers(2, 12), st.integers(0, 2**20))
def test_height_groups_sizes_differ_at_most_one(k, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(k, 60))
    profile = rng.random(n)
    sizes = np.bincount(height_group_assignments(profile, k), minlength=k)
    assert sizes.max() - sizes.min() <= 1
    assert sizes.sum() == n


@given(st.integers(1, 10), st.integers(0, 2**20))
def test_width_bins_partition_everything(k, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 50))
    profile = rng.random(n)
    assignments, empty = width_bin_assignments(profile, k)
    assert assignments.min() >= 0 and assignments.max() < k
    occupied = np.bincount(assignments, minlength=k) > 0
    assert np.array_equal(occupied, ~empty)


def test_full_pipeline_deterministic(iris):
    from hdclust.bench import Algorithm, ExperimentConfig, run_experiment

    config = ExperimentConfig(
        dataset="iris", algorithm=Algorithm.BIN_HEIGHT, seeds=(3, 5), dim=2048
    )
    a = run_experiment(config, iris)
    b = run_experiment(config, iris)
    for ra, rb in zip(a.records, b.records):
        assert ra.accuracy == rb.accuracy
        assert ra.iterations == rb.iterations
        assert ra.converged == rb.converged
