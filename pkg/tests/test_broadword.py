import numpy as np
import pytest

from pdtrie import bits as bw

U = np.uint64


def scan_close(w, e):
    """Bit-by-bit forward zero-crossing oracle."""
    for p in range(64):
        e += 1 if (w >> p) & 1 else -1
        if e == 0:
            return p
    return 64


def scan_open(w, e):
    for p in range(63, -1, -1):
        if (w >> p) & 1:
            e -= 1
            if e == 0:
                return p
        else:
            e += 1
    return -1


def test_byte_counts_examples():
    assert int(bw.byte_counts(U(0))) == 0
    assert int(bw.byte_counts(U(0xFFFFFFFFFFFFFFFF))) == 0x0808080808080808
    assert int(bw.byte_counts(U(0xF0))) == 4


def test_byte_counts_sum_is_popcount():
    rng = np.random.default_rng(0)
    for w in rng.integers(0, 1 << 64, 2000, dtype=np.uint64):
        lanes = [(int(bw.byte_counts(w)) >> (8 * i)) & 0xFF for i in range(8)]
        assert sum(lanes) == bin(int(w)).count("1") == bw.popcount(w)


def test_byte_min_excess_table():
    # monotone ascent has a positive minimum; all-closes hit -8
    assert bw.byte_min_excess(0b11111111) == 1
    assert bw.byte_min_excess(0) == -8
    assert bw.byte_min_excess(0b01010101) == 0  # "()()()()" LSB-first
    for b in range(256):
        exc, best = 0, 8
        for i in range(8):
            exc += 1 if (b >> i) & 1 else -1
            best = min(best, exc)
        assert bw.byte_min_excess(b) == best
        assert int(bw.MIN_EXCESS_CLAMP[b]) == max(0, -best)


def test_min_excess_lanes_examples():
    assert int(bw.min_excess_lanes(U(0))) == 0x0808080808080808
    assert int(bw.min_excess_lanes(U(0xFFFFFFFFFFFFFFFF))) == 0
    w = U(0x0101010101010101 * 0x55)  # "()()()()" in every byte
    assert int(bw.min_excess_lanes(w)) == 0


def lanes(x):
    return [(int(x) >> (8 * i)) & 0xFF for i in range(8)]


def test_lane_excess_examples():
    assert lanes(bw.lane_excess(U(0xFFFFFFFFFFFFFFFF), 0)) == [0, 8, 16, 24, 32, 40, 48, 56]
    assert lanes(bw.lane_excess(U(0), 64)) == [64, 56, 48, 40, 32, 24, 16, 8]
    assert lanes(bw.lane_excess(U(0x123456789ABCDEF0), 0))[0] == 0


def test_lane_excess_matches_prefix_sums():
    # 10^6 random (word, entering excess) pairs against a cumsum oracle,
    # checked lane by lane up to the first zero crossing
    rng = np.random.default_rng(1)
    n = 1_000_000
    ws = rng.integers(0, 1 << 64, n, dtype=np.uint64)
    es = rng.integers(0, 65, n)
    unpacked = np.unpackbits(ws.view(np.uint8), bitorder="little").reshape(n, 64)
    steps = 2 * unpacked.astype(np.int32) - 1
    csum = np.cumsum(steps, axis=1)
    byte_pref = np.concatenate(
        [np.zeros((n, 1), np.int32), csum[:, 7::8]], axis=1)  # excess entering each byte
    entering = byte_pref[:, :8] + es[:, None]
    crossed = np.minimum.accumulate(np.concatenate(
        [np.full((n, 1), 2**30, np.int32),
         csum[:, 7::8][:, :-1] + es[:, None].astype(np.int32)], axis=1), axis=1) <= 0
    for k in rng.integers(0, n, 4000):
        le = lanes(bw.lane_excess(ws[k], int(es[k])))
        for lane in range(8):
            if crossed[k, lane]:
                break  # lanes past a crossing may carry borrow garbage
            assert le[lane] == entering[k, lane], (hex(int(ws[k])), es[k], lane)


def test_lanes_leq():
    x = U(0x0102030405060708)
    assert lanes(bw.lanes_leq(x, x)) == [0x80] * 8  # non-strict convention
    assert lanes(bw.lanes_leq(U(0), U(0x0808080808080808))) == [0x80] * 8
    # a strictly larger lane stays unmarked
    m = lanes(bw.lanes_leq(U(0x08), U(0x01)))
    assert m[0] == 0 and m[1:] == [0x80] * 7


def test_first_marked_lane():
    assert bw.first_marked_lane(U(0)) == -1
    assert bw.first_marked_lane(U(0x80)) == 0
    assert bw.first_marked_lane(U(0x8000000080000000)) == 3
    assert bw.trailing_zeros(U(1) << U(17)) == 17


def test_select_in_word():
    rng = np.random.default_rng(2)
    for w in rng.integers(1, 1 << 64, 3000, dtype=np.uint64):
        ones = [p for p in range(64) if (int(w) >> p) & 1]
        for i in (0, len(ones) // 2, len(ones) - 1):
            assert bw.select_in_word(w, i) == ones[i]


def test_in_word_search_exhaustive_bytes():
    # every byte at lane 0, with every feasible entering excess, against the
    # bit-by-bit oracle; remaining lanes stressed separately by randomness
    rng = np.random.default_rng(3)
    for b in range(256):
        for e in range(1, 18):
            w = U(b) | (rng.integers(0, 1 << 56, dtype=np.uint64) << U(8))
            assert bw.find_close_in_word(w, e) == scan_close(int(w), e)


def test_in_word_search_random():
    rng = np.random.default_rng(4)
    for _ in range(60_000):
        w = int(rng.integers(0, 1 << 64, dtype=np.uint64))
        e = int(rng.integers(1, 65))
        assert bw.find_close_in_word(U(w), e) == scan_close(w, e)
        assert bw.find_open_in_word(U(w), e) == scan_open(w, e)


@pytest.mark.parametrize("w,e", [(0xFFFFFFFFFFFFFFFF, 64), (0, 1), (0, 64),
                                 ((1 << 63), 1), (1, 1), (2**64 - 2, 1)])
def test_in_word_search_edges(w, e):
    assert bw.find_close_in_word(U(w), e) == scan_close(w, e)
    assert bw.find_open_in_word(U(w), e) == scan_open(w, e)
