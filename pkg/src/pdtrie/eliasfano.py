"""Elias-Fano encoding of non-decreasing integer sequences.

Values in [0, n) split into a packed array of fixed-width low bits and a
unary-coded high part in a bitvector; access(i) is a select on the high
part plus a low-bits fetch.  The high part carries a dense-select table
when its 1-gaps allow it (at most 64 bits apart), otherwise a hinted
binary-search select.
"""

import numpy as np
from numba import njit

from .bits import U1
from .bitvector import Bits, pack_bools, select1_dense, select1_hinted

HIGH_DENSE = 0
HIGH_HINTED = 1

_EMPTY_U32 = np.empty(0, dtype=np.uint32)
_EMPTY_U64 = np.empty(0, dtype=np.uint64)
_EMPTY_I64 = np.empty(0, dtype=np.int64)


@njit(cache=True)
def low_get(low, lbits, i):
    if lbits == 0:
        return np.int64(0)
    b = i * lbits
    w = b >> 6
    off = np.uint64(b & 63)
    v = low[w] >> off
    if (b & 63) + lbits > 64:
        v |= low[w + 1] << (np.uint64(64) - off)
    return np.int64(v & ((U1 << np.uint64(lbits)) - U1))


@njit(cache=True)
def ef_access(low, lbits, hwords, hkind, hdense, hcounts, hhints, i):
    if hkind == 0:
        hp = select1_dense(hwords, hdense, i)
    else:
        hp = select1_hinted(hwords, hcounts, hhints, i)
    return ((hp - i) << lbits) | low_get(low, lbits, i)


@njit(cache=True)
def ef_pair(low, lbits, hwords, hkind, hdense, hcounts, hhints, i):
    """(value i, value i+1): one select, then a forward scan to the next 1."""
    if hkind == 0:
        hp = select1_dense(hwords, hdense, i)
    else:
        hp = select1_hinted(hwords, hcounts, hhints, i)
    v0 = ((hp - i) << lbits) | low_get(low, lbits, i)
    p = hp + 1
    w = p >> 6
    cur = hwords[w] >> np.uint64(p & 63)
    while cur == np.uint64(0):
        w += 1
        p = w << 6
        cur = hwords[w]
    while not (cur & U1):
        cur >>= U1
        p += 1
    v1 = ((p - (i + 1)) << lbits) | low_get(low, lbits, i + 1)
    return v0, v1


def _pack_low(values, lbits):
    if lbits == 0:
        return _EMPTY_U64
    m = values.shape[0]
    nbits = m * lbits
    words = np.zeros((nbits + 63) // 64 + 1, dtype=np.uint64)
    lowv = (values & ((1 << lbits) - 1)).astype(np.uint64)
    _fill_low(words, lowv, lbits)
    return words


@njit(cache=True)
def _fill_low(words, lowv, lbits):
    for i in range(lowv.shape[0]):
        b = i * lbits
        w = b >> 6
        off = np.uint64(b & 63)
        words[w] |= lowv[i] << off
        if (b & 63) + lbits > 64:
            words[w + 1] |= lowv[i] >> (np.uint64(64) - off)


class EliasFano:
    """Monotone sequence with constant-time positional access."""

    def __init__(self, values, universe):
        values = np.ascontiguousarray(values, dtype=np.int64)
        if values.shape[0] and int(values.min()) < 0:
            raise ValueError("negative value in sequence")
        if values.shape[0] and int(values.max()) >= universe:
            raise ValueError("value outside the universe")
        if values.shape[0] > 1 and int(np.diff(values).min()) < 0:
            raise ValueError("sequence is not non-decreasing")
        self.m = int(values.shape[0])
        self.universe = int(universe)
        if self.m == 0 or universe <= self.m:
            self.lbits = 0
        else:
            self.lbits = max(0, (universe // self.m).bit_length() - 1)
        self.low = _pack_low(values, self.lbits)
        hlen = (self.universe >> self.lbits) + self.m + 1
        hbits = np.zeros(hlen, dtype=np.uint8)
        if self.m:
            hbits[(values >> self.lbits) + np.arange(self.m)] = 1
        hwords, hn = pack_bools(hbits)
        if self.m:
            pos = np.flatnonzero(hbits)
            dense_ok = pos.shape[0] == 1 or int(np.diff(pos).max()) <= 64
        else:
            dense_ok = False
        if dense_ok:
            self.high = Bits(hwords, hn, with_rank=False)
            self.high.ensure_dense()
            self.high_kind = HIGH_DENSE
        else:
            self.high = Bits(hwords, hn, with_rank=True)
            if self.m:
                self.high.ensure_select1()
            self.high_kind = HIGH_HINTED

    def _kernel_args(self):
        h = self.high
        return (
            self.low,
            self.lbits,
            h.words,
            self.high_kind,
            h.dense if h.dense is not None else _EMPTY_U32,
            h.counts if h.counts is not None else _EMPTY_U64,
            h.sel1 if h.sel1 is not None else _EMPTY_I64,
        )

    def __len__(self):
        return self.m

    def access(self, i):
        if not 0 <= i < self.m:
            raise IndexError("sequence index out of range")
        return int(ef_access(*self._kernel_args(), i))

    def pair(self, i):
        """(values[i], values[i+1]) with one select call."""
        if not 0 <= i < self.m - 1:
            raise IndexError("sequence index out of range")
        a, b = ef_pair(*self._kernel_args(), i)
        return int(a), int(b)

    def to_list(self):
        return [self.access(i) for i in range(self.m)]

    def size_in_bits(self):
        out = {"low": self.low.nbytes * 8}
        for k, v in self.high.size_in_bits().items():
            out["high_" + k] = v
        return out
