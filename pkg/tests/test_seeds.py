"""Seed bank generation: determinism and the exact linear level decay."""

import numpy as np
import pytest

from hdclust.errors import EmptyInput, InvalidQuantization
from hdclust.hv import Mode, similarity
from hdclust.rng import RngStream
from hdclust.seeds import generate_level_hvs, generate_random_hvs, make_seed_set


def test_same_seed_bit_identical_banks():
    a = make_seed_set(42, n_features=5, q=8, dim=2048, mode=Mode.BINARY)
    b = make_seed_set(42, n_features=5, q=8, dim=2048, mode=Mode.BINARY)
    assert all(x == y for x, y in zip(a.ids, b.ids))
    assert all(x == y for x, y in zip(a.levels, b.levels))


def test_different_seeds_differ():
    a = make_seed_set(1, n_features=2, q=4, dim=1024, mode=Mode.BINARY)
    b = make_seed_set(2, n_features=2, q=4, dim=1024, mode=Mode.BINARY)
    assert a.ids[0] != b.ids[0]


def test_random_hvs_reject_zero_count():
    with pytest.raises(EmptyInput):
        generate_random_hvs(RngStream(0), 0, 16, Mode.BINARY)


def test_invalid_q():
    with pytest.raises(InvalidQuantization):
        generate_level_hvs(RngStream(0), 1, 128, Mode.BINARY)


def test_random_pair_quasi_orthogonal_at_10k():
    vs = generate_random_hvs(RngStream(7), 2, 10000, Mode.BINARY)
    assert 0.47 <= similarity(vs[0], vs[1]).value <= 0.53


def test_id_bank_pairwise_band():
    seeds = make_seed_set(3, n_features=6, q=16, dim=10000, mode=Mode.BINARY)
    for i in range(6):
        for j in range(i + 1, 6):
            assert 0.47 <= similarity(seeds.ids[i], seeds.ids[j]).value <= 0.53


@pytest.mark.parametrize("q,dim", [(16, 10000), (5, 640), (2, 100)])
def test_level_decay_exactly_linear(q, dim):
    # disjoint flip blocks make delta(L_i, L_j) = |i-j| * block / dim exactly
    levels = generate_level_hvs(RngStream(11), q, dim, Mode.BINARY)
    block = dim // (2 * (q - 1))
    for i in range(q):
        for j in range(q):
            expected = abs(i - j) * block / dim
            assert similarity(levels[i], levels[j]).value == expected


def test_level_decay_q16_d10000_examples():
    levels = generate_level_hvs(RngStream(0), 16, 10000, Mode.BINARY)
    # consecutive levels differ in floor(10000/30) = 333 bits
    assert similarity(levels[0], levels[1]).value == 333 / 10000
    # monotone chain: closer levels are more similar
    assert similarity(levels[0], levels[7]).value < similarity(levels[0], levels[15]).value
    # extremes are quasi-orthogonal
    assert similarity(levels[0], levels[15]).value == pytest.approx(0.5, abs=0.01)


def test_level_decay_q2_half_flip():
    levels = generate_level_hvs(RngStream(5), 2, 101, Mode.BINARY)
    assert similarity(levels[0], levels[1]).value == (101 // 2) / 101


def test_integer_levels_linear_cosine_decay():
    dim, q = 1000, 6
    levels = generate_level_hvs(RngStream(2), q, dim, Mode.INTEGER)
    block = dim // (2 * (q - 1))
    for i in range(q):
        for j in range(q):
            # flipping b of d bipolar signs moves cosine to 1 - 2b/d
            expected = 1.0 - 2.0 * abs(i - j) * block / dim
            assert similarity(levels[i], levels[j]).value == pytest.approx(expected, abs=1e-12)


def test_integer_seeds_are_bipolar():
    vs = generate_random_hvs(RngStream(1), 3, 512, Mode.INTEGER)
    for v in vs:
        assert set(np.unique(v.data)) <= {-1, 1}


def test_stream_child_is_reproducible():
    a = RngStream(9).child(4, 2).bits(64)
    b = RngStream(9).child(4, 2).bits(64)
    assert np.array_equal(a, b)
    c = RngStream(9).child(4, 3).bits(64)
    assert not np.array_equal(a, c)
