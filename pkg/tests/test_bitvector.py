import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdtrie.bitvector import Bits, rank1_many


def test_spec_examples():
    v = Bits.from_string("10110")
    assert v.rank(1, 0) == 0
    assert v.rank(1, 5) == 3
    assert v.rank(0, 3) == 1
    assert v.select(1, 0) == 0
    assert v.select(1, 2) == 3
    assert v.select(0, 1) == 4


def test_bounds_errors():
    v = Bits.from_string("10110")
    with pytest.raises(IndexError):
        v.rank(1, 6)
    with pytest.raises(IndexError):
        v.select(1, 3)
    with pytest.raises(IndexError):
        v.select(0, 2)


@pytest.mark.parametrize("density", [0.01, 0.5, 0.99])
def test_rank_select_vs_naive(density):
    rng = np.random.default_rng(int(density * 100))
    b = (rng.random(200_000) < density).astype(np.uint8)
    v = Bits.from_bools(b)
    cs = np.concatenate([[0], np.cumsum(b, dtype=np.int64)])
    qs = rng.integers(0, b.shape[0] + 1, 3000)
    out = np.empty(qs.shape[0], dtype=np.int64)
    rank1_many(v.words, v.counts, qs, out)
    assert np.array_equal(out, cs[qs])
    ones = np.flatnonzero(b)
    zeros = np.flatnonzero(1 - b)
    for i in rng.integers(0, len(ones), 800):
        assert v.select(1, int(i)) == ones[i]
    for i in rng.integers(0, len(zeros), 800):
        assert v.select(0, int(i)) == zeros[i]
    # rank(select) identity and select(rank) relation
    for i in rng.integers(0, len(ones), 200):
        p = v.select(1, int(i))
        assert v.rank(1, p) == i and v.get(p) == 1
    for p in rng.integers(0, b.shape[0], 200):
        p = int(p)
        r = v.rank(1, p)
        if r < len(ones):
            q = v.select(1, r)
            assert q >= p and b[q] == 1 and not b[p:q].any()


def test_many_small_vectors_vs_naive():
    # the differential sweep: 10^5 random vectors against O(n) scans
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(100_000):
        n = int(rng.integers(1, 80))
        b = rng.integers(0, 2, n, dtype=np.uint8)
        if checked < 500:  # full-resolution check on a sample
            v = Bits.from_bools(b)
            cs = np.concatenate([[0], np.cumsum(b)])
            for i in range(n + 1):
                assert v.rank(1, i) == cs[i]
            for i, p in enumerate(np.flatnonzero(b)):
                assert v.select(1, int(i)) == p
            for i, p in enumerate(np.flatnonzero(1 - b)):
                assert v.select(0, int(i)) == p
        else:  # cheap spot checks keep the sweep at the stated scale
            v = Bits.from_bools(b)
            i = int(rng.integers(0, n + 1))
            assert v.rank(1, i) == int(b[:i].sum())
        checked += 1
    assert checked == 100_000


@given(st.lists(st.integers(0, 1), min_size=1, max_size=300))
def test_rank_select_roundtrip_property(bits):
    v = Bits.from_bools(np.array(bits, dtype=np.uint8))
    ones = [p for p, x in enumerate(bits) if x]
    for i, p in enumerate(ones):
        assert v.select(1, i) == p
        assert v.rank(1, p) == i
    assert v.rank(1, len(bits)) == len(ones)


def test_rank_overhead_bound():
    v = Bits.from_bools(np.ones(1 << 20, dtype=np.uint8))
    sizes = v.size_in_bits()
    assert sizes["rank"] <= 0.30 * sizes["bits"]


def test_dense_select():
    rng = np.random.default_rng(8)
    pos = np.unique(np.concatenate([
        np.sort(rng.choice(300_000, 20_000, replace=False)),
        np.arange(0, 300_000, 60)]))
    b = np.zeros(300_000, dtype=np.uint8)
    b[pos] = 1
    v = Bits.from_bools(b).ensure_dense()
    for i in rng.integers(0, len(pos), 2000):
        assert v.dense_select(int(i)) == pos[i]
    sizes = v.size_in_bits()
    assert sizes["dense"] <= 0.40 * sizes["bits"]
    # all-ones: dense_select(i) == i
    u = Bits.from_bools(np.ones(5000, dtype=np.uint8)).ensure_dense()
    for i in (0, 1, 63, 64, 4999):
        assert u.dense_select(i) == i
    assert u.size_in_bits()["dense"] <= 0.40 * u.size_in_bits()["bits"]


def test_dense_select_gap_check():
    b = np.zeros(200, dtype=np.uint8)
    b[0] = b[63] = b[127] = 1
    v = Bits.from_bools(b).ensure_dense()
    assert v.dense_select(1) == 63
    bad = np.zeros(200, dtype=np.uint8)
    bad[0] = bad[66] = 1  # gap of 65 violates the construction precondition
    with pytest.raises(ValueError):
        Bits.from_bools(bad).ensure_dense()
