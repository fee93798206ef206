"""Word-level broadword primitives.

A 64-bit word is treated as eight byte lanes (lane 0 = least significant
byte).  When a word holds a chunk of a parenthesis sequence, sequence
position p maps to bit p of the word (LSB-first) and bit 1 means '('
(+1 excess), bit 0 means ')' (-1 excess).

The in-word searches locate the first position where the running excess,
started from a small entering value, crosses zero.  They are exact for
entering excess in [1, 64]; callers skip words with larger excess using a
single popcount, since a 64-bit word can decrease the excess by at most 64.
"""

import numpy as np
from numba import njit

U0 = np.uint64(0)
U1 = np.uint64(1)
U2 = np.uint64(2)
U4 = np.uint64(4)
U7 = np.uint64(7)
U8 = np.uint64(8)
U16 = np.uint64(16)
U32 = np.uint64(32)
U56 = np.uint64(56)
U58 = np.uint64(58)
UFF = np.uint64(0xFF)

ONES_STEP_8 = np.uint64(0x0101010101010101)
MSBS_STEP_8 = np.uint64(0x8080808080808080)
EIGHTS_STEP_8 = np.uint64(0x0808080808080808)

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_BSW1 = np.uint64(0x00FF00FF00FF00FF)
_BSW2 = np.uint64(0x0000FFFF0000FFFF)

# de Bruijn sequence for a branch-free LSB index
_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_TAB = np.zeros(64, dtype=np.int64)
for _i in range(64):
    _DEBRUIJN_TAB[int((1 << _i) * 0x03F79D71B4CB0A89 % (1 << 64)) >> 58] = _i


def _build_min_excess_table(lsb_first, one_is_open):
    # min over nonempty prefixes of the +-1 walk of each byte value
    tab = np.zeros(256, dtype=np.int8)
    for b in range(256):
        exc = 0
        best = 8  # any prefix value is <= 8
        order = range(8) if lsb_first else range(7, -1, -1)
        for i in order:
            bit = (b >> i) & 1
            exc += 1 if bit == one_is_open else -1
            if exc < best:
                best = exc
        tab[b] = best
    return tab


# forward scan: LSB-first, bit 1 = '(' = +1
MIN_EXCESS = _build_min_excess_table(lsb_first=True, one_is_open=True)
# backward scan runs over byte-swapped words: within a byte the walk goes
# MSB-first and the roles flip (')' raises the number of unmatched closes)
MIN_EXCESS_BWD = _build_min_excess_table(lsb_first=False, one_is_open=False)

# clamped lanes: max(0, -min_excess); a byte with strictly positive
# min-excess can never contain a zero crossing, and the non-strict <=
# comparison below keeps its lane unmarked because the entering excess
# is always >= 1 during a search.
MIN_EXCESS_CLAMP = np.maximum(0, -MIN_EXCESS.astype(np.int64)).astype(np.uint64)
MIN_EXCESS_CLAMP_BWD = np.maximum(0, -MIN_EXCESS_BWD.astype(np.int64)).astype(np.uint64)


@njit(cache=True)
def byte_counts(w):
    """Per-lane popcount: lane i holds the number of set bits of byte i."""
    w = w - ((w >> U1) & _M1)
    w = (w & _M2) + ((w >> U2) & _M2)
    return (w + (w >> U4)) & _M4


@njit(cache=True)
def popcount(w):
    return np.int64((byte_counts(w) * ONES_STEP_8) >> U56)


@njit(cache=True)
def word_excess(w):
    return 2 * popcount(w) - 64


@njit(cache=True)
def byteswap(w):
    w = ((w & _BSW1) << U8) | ((w >> U8) & _BSW1)
    w = ((w & _BSW2) << U16) | ((w >> U16) & _BSW2)
    return (w << U32) | (w >> U32)


def byte_min_excess(b):
    """Min prefix excess of byte b, scanned LSB-first; in [-8, +1]."""
    return int(MIN_EXCESS[b])


@njit(cache=True)
def min_excess_lanes(w):
    """Lane i = max(0, -min_excess(byte i)) of w, assembled from the table."""
    r = MIN_EXCESS_CLAMP[w & UFF]
    r |= MIN_EXCESS_CLAMP[(w >> U8) & UFF] << U8
    r |= MIN_EXCESS_CLAMP[(w >> U16) & UFF] << U16
    r |= MIN_EXCESS_CLAMP[(w >> np.uint64(24)) & UFF] << np.uint64(24)
    r |= MIN_EXCESS_CLAMP[(w >> U32) & UFF] << U32
    r |= MIN_EXCESS_CLAMP[(w >> np.uint64(40)) & UFF] << np.uint64(40)
    r |= MIN_EXCESS_CLAMP[(w >> np.uint64(48)) & UFF] << np.uint64(48)
    r |= MIN_EXCESS_CLAMP[(w >> U56) & UFF] << U56
    return r


@njit(cache=True)
def lane_excess(w, e_w):
    """Lane i = excess entering byte i, starting from e_w before bit 0.

    Exact up to and including the first byte whose walk crosses zero;
    later lanes may carry borrow garbage, which is harmless because the
    answer lies at or before that byte.
    """
    c8 = byte_counts(w)
    return (np.uint64(e_w) + ((U2 * c8 - EIGHTS_STEP_8) << U8)) * ONES_STEP_8


@njit(cache=True)
def lanes_leq(x, y):
    """High bit of lane i set iff x_i <= y_i; lanes must be < 128."""
    return ((y | MSBS_STEP_8) - (x & ~MSBS_STEP_8)) & MSBS_STEP_8


@njit(cache=True)
def trailing_zeros(w):
    """Index of the lowest set bit; w must be nonzero."""
    lsb = w & (U0 - w)
    return _DEBRUIJN_TAB[(lsb * _DEBRUIJN) >> U58]


@njit(cache=True)
def first_marked_lane(l):
    """Index of the lowest marked lane, or -1 when no lane is marked."""
    if l == U0:
        return -1
    lsb = l & (U0 - l)
    return _DEBRUIJN_TAB[(lsb * _DEBRUIJN) >> U58] >> 3


@njit(cache=True)
def select_in_word(w, i):
    """Position of the i-th (0-based) set bit of w; i < popcount(w)."""
    c8 = byte_counts(w) * ONES_STEP_8  # lane j = popcount of bytes 0..j
    spread = np.uint64(i) * ONES_STEP_8
    # lanes where cumulative count <= i still precede the target byte
    marked = lanes_leq(c8, spread)
    byte = np.int64(((marked >> U7) * ONES_STEP_8) >> U56)
    rank = i
    if byte > 0:
        rank -= np.int64((c8 >> np.uint64(8 * byte - 8)) & UFF)
    b = (w >> np.uint64(8 * byte)) & UFF
    for bit in range(8):
        if (b >> np.uint64(bit)) & U1:
            if rank == 0:
                return byte * 8 + bit
            rank -= 1
    return -1  # unreachable when i < popcount(w)


@njit(cache=True)
def find_close_in_word(w, e):
    """First bit p of w where the excess walk from e reaches zero.

    e is the excess entering bit 0, required in [1, 64].  Returns 64 when
    the walk stays positive across the whole word.
    """
    e8 = lane_excess(w, e)
    m8 = min_excess_lanes(w)
    lane = first_marked_lane(lanes_leq(e8, m8))
    if lane < 0:
        return 64
    exc = np.int64((e8 >> np.uint64(8 * lane)) & UFF)
    b = (w >> np.uint64(8 * lane)) & UFF
    for bit in range(8):
        if (b >> np.uint64(bit)) & U1:
            exc += 1
        else:
            exc -= 1
            if exc == 0:
                return lane * 8 + bit
    return 64  # unreachable for a marked lane


@njit(cache=True)
def find_open_in_word(w, e):
    """Backward mate search: scan bits 63..0 of w with e unmatched closes.

    A ')' raises the count, a '(' lowers it; returns the bit index of the
    '(' where the count reaches zero, or -1 when the word is exhausted.
    e is required in [1, 64].
    """
    r = byteswap(w)
    c8z = EIGHTS_STEP_8 - byte_counts(r)  # zeros per byte are the +1 steps
    e8 = (np.uint64(e) + ((U2 * c8z - EIGHTS_STEP_8) << U8)) * ONES_STEP_8
    m8 = MIN_EXCESS_CLAMP_BWD[r & UFF]
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> U8) & UFF] << U8
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> U16) & UFF] << U16
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> np.uint64(24)) & UFF] << np.uint64(24)
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> U32) & UFF] << U32
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> np.uint64(40)) & UFF] << np.uint64(40)
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> np.uint64(48)) & UFF] << np.uint64(48)
    m8 |= MIN_EXCESS_CLAMP_BWD[(r >> U56) & UFF] << U56
    lane = first_marked_lane(lanes_leq(e8, m8))
    if lane < 0:
        return -1
    exc = np.int64((e8 >> np.uint64(8 * lane)) & UFF)
    b = (r >> np.uint64(8 * lane)) & UFF
    for bit in range(8):  # MSB-first within the swapped byte
        if (b >> np.uint64(7 - bit)) & U1:
            exc -= 1
            if exc == 0:
                return (7 - lane) * 8 + (7 - bit)
        else:
            exc += 1
    return -1  # unreachable for a marked lane
