import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_balanced, random_tree_dfuds, stack_mates
from pdtrie import bits as bw
from pdtrie.bitvector import Bits, unpack_words
from pdtrie.bp import BalancedParens, _tree_next


def test_spec_examples():
    bp = BalancedParens.from_string("(())()")
    assert bp.excess(0) == 0
    assert bp.excess(3) == 1  # 2*rank1(3) - 3
    assert bp.excess(6) == 0
    assert bp.find_close(0) == 3
    assert bp.find_close(1) == 2
    assert bp.find_open(3) == 0
    assert bp.find_open(5) == 4


def test_degenerate_and_errors():
    empty = BalancedParens(Bits.from_bools(np.zeros(0, dtype=np.uint8)))
    assert len(empty) == 0
    pair = BalancedParens.from_string("()")
    assert pair.find_close(0) == 1 and pair.find_open(1) == 0
    with pytest.raises(ValueError):
        BalancedParens.from_string("(()")  # odd length
    with pytest.raises(ValueError):
        BalancedParens.from_string("))((")  # negative prefix excess
    with pytest.raises(ValueError):
        pair.find_close(1)  # not an open
    with pytest.raises(ValueError):
        pair.find_open(0)
    with pytest.raises(IndexError):
        pair.excess(3)


def check_all_mates(bits, block_size=512):
    bp = BalancedParens(Bits.from_bools(bits), block_size=block_size)
    mate = stack_mates(bits)
    opens = np.flatnonzero(bits)
    closes = np.flatnonzero(1 - bits)
    assert np.array_equal(bp.find_close_many(opens), mate[opens])
    assert np.array_equal(bp.find_open_many(closes), mate[closes])
    return bp, mate


def test_random_walks_oracle():
    rng = np.random.default_rng(31)
    for _ in range(120):
        n = int(rng.integers(1, 4000)) * 2
        check_all_mates(random_balanced(n, rng))


def test_tree_shaped_oracle():
    rng = np.random.default_rng(32)
    for nodes in (2, 17, 1000, 20_000):
        check_all_mates(random_tree_dfuds(nodes, rng))


def test_pathological_shapes():
    deep = np.array([1] * 50_000 + [0] * 50_000, dtype=np.uint8)
    check_all_mates(deep)
    comb = np.array(([1] * 63 + [0] * 63 + [1, 0]) * 1000, dtype=np.uint8)
    check_all_mates(comb)
    # tiny block size exercises the tree path heavily
    rng = np.random.default_rng(33)
    check_all_mates(random_balanced(20_000, rng), block_size=64)


def test_mate_involution_and_excess_law():
    rng = np.random.default_rng(34)
    bits = random_balanced(60_000, rng)
    bp = BalancedParens(Bits.from_bools(bits))
    opens = np.flatnonzero(bits)
    fc = bp.find_close_many(opens)
    fo = bp.find_open_many(fc)
    assert np.array_equal(fo, opens)  # find_open(find_close(i)) == i
    for i in rng.integers(0, len(opens), 500):
        p = int(opens[i])
        m = int(fc[i])
        assert bp.excess(m + 1) == bp.excess(p)
        # between mates the opens and closes balance out
        seg = bits[p:m + 1]
        assert int(seg.sum()) * 2 == seg.shape[0]


def test_min_tree_block_agreement():
    # the min-only search must land on the block that holds the answer
    rng = np.random.default_rng(35)
    for _ in range(40):
        bits = random_balanced(int(rng.integers(8, 64)) * 512, rng)
        bp = BalancedParens(Bits.from_bools(bits))
        mate = stack_mates(bits)
        opens = np.flatnonzero(bits)
        for i in rng.integers(0, len(opens), 60):
            p = int(opens[i])
            m = int(mate[p])
            b0 = p // bp.block_size
            if m // bp.block_size == b0:
                continue  # resolved in-block, the tree is not consulted
            target = bp.excess(p)
            b = _tree_next(bp.heap, bp.leaf_base, b0, target)
            assert b == m // bp.block_size or (m + 1) % bp.block_size == 0 and \
                b == (m + 1) // bp.block_size, (p, m, b)


def test_block_search_vs_bytewise_reference():
    # randomized full blocks, broadword result vs a byte-by-byte table scan
    rng = np.random.default_rng(36)
    table = bw.MIN_EXCESS

    def bytewise(words, e):
        for wi, w in enumerate(words):
            for by in range(8):
                b = (int(w) >> (8 * by)) & 0xFF
                if e + int(table[b]) <= 0:
                    for t in range(8):
                        e += 1 if (b >> t) & 1 else -1
                        if e == 0:
                            return wi * 64 + by * 8 + t
                else:
                    e += 2 * bin(b).count("1") - 8
        return -1

    from pdtrie.bp import _scan_fwd
    for k in range(120_000):
        words = rng.integers(0, 1 << 64, 8, dtype=np.uint64)
        e = int(rng.integers(1, 65 if k % 2 else 9))
        got, _ = _scan_fwd(words, 0, 512, e)
        assert got == bytewise(words, e)


@given(st.integers(2, 60))
def test_small_balanced_property(pairs):
    rng = np.random.default_rng(pairs)
    bits = random_balanced(2 * pairs, rng)
    check_all_mates(bits)
