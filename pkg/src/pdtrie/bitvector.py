"""Plain bitvector with rank/select support.

Rank uses a two-level interleaved directory: one 64-bit cumulative count
per 512-bit superblock plus seven 9-bit within-superblock counts packed
into a second word (25% overhead, one cache line per rank).

Select comes in two flavours:
- hinted binary search: the position of every ``step``-th set (or clear)
  bit bounds a binary search over superblock counts;
- dense select for vectors whose consecutive 1s are at most 64 bits
  apart: the position of every 128th one plus a bounded popcount walk,
  with no overflow structure needed.
"""

import numpy as np
from numba import njit

from .bits import U1, popcount, select_in_word

SELECT_HINT_STEP = 8192
DENSE_SAMPLE = 128


def pack_bools(arr):
    """Pack a 0/1 array into little-endian uint64 words."""
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    n = arr.shape[0]
    by = np.packbits(arr, bitorder="little")
    pad = (-by.shape[0]) % 8
    if pad:
        by = np.concatenate([by, np.zeros(pad, dtype=np.uint8)])
    return by.view(np.uint64), n


def unpack_words(words, n):
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n]


def build_rank(words):
    """Interleaved two-level rank directory over uint64 words."""
    nw = words.shape[0]
    nsb = (nw + 7) // 8
    wpop = np.bitwise_count(words).astype(np.uint64)
    padded = np.zeros(nsb * 8, dtype=np.uint64)
    padded[:nw] = wpop
    blocks = padded.reshape(nsb, 8)
    within = np.cumsum(blocks, axis=1, dtype=np.uint64)
    totals = within[:, 7] if nsb else np.zeros(0, dtype=np.uint64)
    counts = np.zeros(2 * nsb + 2, dtype=np.uint64)
    if nsb:
        counts[2:2 * nsb + 1:2] = np.cumsum(totals, dtype=np.uint64)
        packed = np.zeros(nsb, dtype=np.uint64)
        for t in range(1, 8):
            packed |= within[:, t - 1] << np.uint64(9 * (t - 1))
        counts[1:2 * nsb:2] = packed
    return counts


@njit(cache=True)
def rank1_word(words, counts, i):
    w = i >> 6
    if w >= words.shape[0]:
        return np.int64(counts[counts.shape[0] - 2])
    b = w >> 3
    sub = w & 7
    r = np.int64(counts[2 * b])
    if sub:
        r += np.int64((counts[2 * b + 1] >> np.uint64(9 * sub - 9)) & np.uint64(0x1FF))
    off = i & 63
    if off:
        r += popcount(words[w] & ((U1 << np.uint64(off)) - U1))
    return r


@njit(cache=True)
def select1_hinted(words, counts, hints, i):
    j = i >> 13
    lo = np.int64(hints[j]) >> 9
    hi = (np.int64(hints[j + 1]) >> 9) + 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if np.int64(counts[2 * mid]) <= i:
            lo = mid
        else:
            hi = mid
    r = i - np.int64(counts[2 * lo])
    base = lo << 3
    sub = counts[2 * lo + 1]
    wsel = 0
    prev = 0
    for t in range(1, 8):
        if base + t >= words.shape[0]:
            break
        c = np.int64((sub >> np.uint64(9 * t - 9)) & np.uint64(0x1FF))
        if c <= r:
            wsel = t
            prev = c
        else:
            break
    return ((base + wsel) << 6) + select_in_word(words[base + wsel], r - prev)


@njit(cache=True)
def select0_hinted(words, counts, hints, i):
    j = i >> 13
    lo = np.int64(hints[j]) >> 9
    hi = (np.int64(hints[j + 1]) >> 9) + 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if (mid << 9) - np.int64(counts[2 * mid]) <= i:
            lo = mid
        else:
            hi = mid
    r = i - ((lo << 9) - np.int64(counts[2 * lo]))
    base = lo << 3
    sub = counts[2 * lo + 1]
    wsel = 0
    prev = 0
    for t in range(1, 8):
        if base + t >= words.shape[0]:
            break
        c = (t << 6) - np.int64((sub >> np.uint64(9 * t - 9)) & np.uint64(0x1FF))
        if c <= r:
            wsel = t
            prev = c
        else:
            break
    return ((base + wsel) << 6) + select_in_word(~words[base + wsel], r - prev)


@njit(cache=True)
def select1_dense(words, samples, i):
    p = np.int64(samples[i >> 7])
    r = i & 127
    if r == 0:
        return p
    w = p >> 6
    cur = words[w] >> np.uint64(p & 63)
    cur >>= U1  # consume the sampled one itself
    pos = p + 1
    c = popcount(cur)
    while c <= r - 1:
        r -= c
        w += 1
        pos = w << 6
        cur = words[w]
        c = popcount(cur)
    return pos + select_in_word(cur, r - 1)


@njit(cache=True)
def rank1_many(words, counts, qs, out):
    for k in range(qs.shape[0]):
        out[k] = rank1_word(words, counts, qs[k])


class Bits:
    """Immutable bitvector with rank and optional select directories."""

    def __init__(self, words, n, with_rank=True):
        self.words = np.ascontiguousarray(words, dtype=np.uint64)
        self.n = int(n)
        if self.words.shape[0] != (self.n + 63) // 64:
            raise ValueError("word count does not match bit length")
        self.counts = build_rank(self.words) if with_rank else None
        self.sel1 = None
        self.sel0 = None
        self.dense = None

    @classmethod
    def from_bools(cls, arr, **kw):
        words, n = pack_bools(arr)
        return cls(words, n, **kw)

    @classmethod
    def from_string(cls, s, **kw):
        return cls.from_bools(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"), **kw)

    def __len__(self):
        return self.n

    def get(self, i):
        if not 0 <= i < self.n:
            raise IndexError("bit index out of range")
        return int((self.words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    @property
    def num_ones(self):
        return int(self.counts[-2])

    def rank(self, bit, i):
        if not 0 <= i <= self.n:
            raise IndexError("rank position out of range")
        r1 = rank1_word(self.words, self.counts, i)
        return r1 if bit else i - r1

    def rank1(self, i):
        return self.rank(1, i)

    def rank0(self, i):
        return self.rank(0, i)

    def _hints(self, bit, step=SELECT_HINT_STEP):
        # positions of every step-th occurrence; tail entries act as
        # sentinels bounding the last binary-search window
        bits = unpack_words(self.words, self.n)
        pos = np.flatnonzero(bits if bit else 1 - bits)
        hints = np.full(pos.shape[0] // step + 2, max(self.n - 1, 0), dtype=np.int64)
        samp = pos[::step]
        hints[:samp.shape[0]] = samp
        return hints

    def ensure_select1(self):
        if self.sel1 is None:
            self.sel1 = self._hints(1)
        return self

    def ensure_select0(self):
        if self.sel0 is None:
            self.sel0 = self._hints(0)
        return self

    def ensure_dense(self, sample=DENSE_SAMPLE):
        """Build the dense-select table; requires 1-gaps of at most 64 bits."""
        if self.dense is None:
            bits = unpack_words(self.words, self.n)
            pos = np.flatnonzero(bits)
            if pos.shape[0] == 0:
                raise ValueError("dense select needs at least one set bit")
            if pos.shape[0] > 1 and int(np.diff(pos).max()) > 64:
                raise ValueError("dense select requires 1-gaps <= 64 bits")
            self.dense = pos[::sample].astype(np.uint32)
        return self

    def select(self, bit, i):
        total = self.num_ones if bit else self.n - self.num_ones
        if not 0 <= i < total:
            raise IndexError("select ordinal out of range")
        if bit:
            self.ensure_select1()
            return select1_hinted(self.words, self.counts, self.sel1, i)
        self.ensure_select0()
        return select0_hinted(self.words, self.counts, self.sel0, i)

    def select1(self, i):
        return self.select(1, i)

    def select0(self, i):
        return self.select(0, i)

    def dense_select(self, i):
        if self.dense is None:
            raise ValueError("dense select table not built")
        if not 0 <= i < self.num_ones:
            raise IndexError("select ordinal out of range")
        return select1_dense(self.words, self.dense, i)

    def size_in_bits(self):
        """Bits used by the raw vector and each directory."""
        out = {"bits": self.words.shape[0] * 64}
        if self.counts is not None:
            out["rank"] = self.counts.nbytes * 8
        if self.sel1 is not None:
            out["sel1"] = self.sel1.nbytes * 8
        if self.sel0 is not None:
            out["sel0"] = self.sel0.nbytes * 8
        if self.dense is not None:
            out["dense"] = self.dense.nbytes * 8
        return out
