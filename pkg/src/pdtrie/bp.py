"""Balanced parentheses with FindClose/FindOpen support.

The sequence is a bitvector (1 = '(', 0 = ')').  A complete binary tree
over fixed-size blocks stores only per-block excess minima; the forward
search descends to the first block whose minimum does not exceed the
target excess, which for mate queries finds the same block a min-max
tree would.  Within blocks the search runs word-at-a-time using the
byte-lane primitives from :mod:`pdtrie.bits`; words whose entering
excess exceeds 64 are skipped with a single popcount since they cannot
contain the crossing.
"""

import numpy as np
from numba import njit

from .bits import U1, popcount, find_close_in_word, find_open_in_word
from .bitvector import Bits, rank1_word, unpack_words

BLOCK_SIZE = 512
_INF = np.int32(2**31 - 1)


@njit(cache=True)
def _scan_fwd(words, s, endpos, rel):
    """Consume bits [s, endpos); return (crossing position, rel) where the
    position is -1 if the walk from rel never reaches zero in the range."""
    while s < endpos:
        off = s & 63
        nbits = 64 - off
        if s + nbits > endpos:
            nbits = endpos - s
        cur = words[s >> 6] >> np.uint64(off)
        if rel <= 64:
            p = find_close_in_word(cur, rel)
            if p < nbits:
                return s + p, 0
        if nbits < 64:
            c = popcount(cur & ((U1 << np.uint64(nbits)) - U1))
        else:
            c = popcount(cur)
        rel += 2 * c - nbits
        s += nbits
    return -1, rel


@njit(cache=True)
def _scan_bwd(words, e, limit, rel):
    """Consume bits e, e-1, ..., limit; return (position of the open where
    the unmatched-close count rel reaches zero, rel), position -1 if none."""
    while e >= limit:
        hi = e & 63
        nbits = hi + 1
        if e - nbits + 1 < limit:
            nbits = e - limit + 1
        cur = words[e >> 6] << np.uint64(63 - hi)
        if rel <= 64:
            p = find_open_in_word(cur, rel)
            if p >= 0 and 63 - p < nbits:
                return e - (63 - p), 0
        if nbits < 64:
            c = popcount(cur >> np.uint64(64 - nbits))
        else:
            c = popcount(cur)
        rel += nbits - 2 * c
        e -= nbits
    return -1, rel


@njit(cache=True)
def _tree_next(heap, leaf_base, b0, target):
    """First leaf block > b0 whose min excess is <= target, or -1."""
    node = leaf_base + b0
    while True:
        while node & 1:
            node >>= 1
        if node <= 1:
            return -1
        node += 1
        if heap[node] <= target:
            break
    while node < leaf_base:
        node <<= 1
        if heap[node] > target:
            node += 1
    return node - leaf_base


@njit(cache=True)
def _tree_prev(heap, leaf_base, b0, target):
    """Last leaf block < b0 whose min excess is <= target, or -1."""
    node = leaf_base + b0
    while True:
        while node > 1 and (node & 1) == 0:
            node >>= 1
        if node <= 1:
            return -1
        node -= 1
        if heap[node] <= target:
            break
    while node < leaf_base:
        node = (node << 1) + 1
        if heap[node] > target:
            node -= 1
    return node - leaf_base


@njit(cache=True)
def bp_excess(words, counts, i):
    return 2 * rank1_word(words, counts, i) - i


@njit(cache=True)
def bp_find_close(words, counts, heap, samples, n, bs, leaf_base, i):
    blk_end = (i // bs + 1) * bs
    if blk_end > n:
        blk_end = n
    found, _ = _scan_fwd(words, i + 1, blk_end, 1)
    if found >= 0:
        return found
    target = 2 * rank1_word(words, counts, i) - i
    b = _tree_next(heap, leaf_base, i // bs, target)
    if b < 0:
        return -1
    endpos = (b + 1) * bs
    if endpos > n:
        endpos = n
    found, _ = _scan_fwd(words, b * bs, endpos, samples[b] - target)
    return found


@njit(cache=True)
def bp_find_open(words, counts, heap, samples, n, bs, leaf_base, j):
    target = 2 * rank1_word(words, counts, j + 1) - (j + 1)
    b0 = j // bs
    start = b0 * bs
    if j > start:
        found, _ = _scan_bwd(words, j - 1, start, 1)
        if found >= 0:
            return found
    b = _tree_prev(heap, leaf_base, b0, target)
    if b < 0:
        return -1
    found, _ = _scan_bwd(words, (b + 1) * bs - 1, b * bs, samples[b + 1] - target)
    return found


@njit(cache=True)
def bp_find_close_many(words, counts, heap, samples, n, bs, leaf_base, qs, out):
    for k in range(qs.shape[0]):
        out[k] = bp_find_close(words, counts, heap, samples, n, bs, leaf_base, qs[k])


@njit(cache=True)
def bp_find_open_many(words, counts, heap, samples, n, bs, leaf_base, qs, out):
    for k in range(qs.shape[0]):
        out[k] = bp_find_open(words, counts, heap, samples, n, bs, leaf_base, qs[k])


class BalancedParens:
    """Immutable balanced-parentheses sequence with mate queries."""

    def __init__(self, bits, block_size=BLOCK_SIZE, check=True):
        if block_size % 64 or block_size <= 0:
            raise ValueError("block size must be a positive multiple of 64")
        self.bits = bits
        self.n = bits.n
        self.block_size = block_size
        n = self.n
        if n % 2:
            raise ValueError("odd-length sequence cannot be balanced")
        raw = unpack_words(bits.words, n).astype(np.int32)
        exc = np.cumsum(2 * raw - 1, dtype=np.int32)  # exc[k] = excess(k+1)
        if check and n:
            if int(exc.min()) < 0 or int(exc[-1]) != 0:
                raise ValueError("sequence is not balanced")
        before = np.empty(n, dtype=np.int32)  # before[k] = excess(k)
        if n:
            before[0] = 0
            before[1:] = exc[:-1]
        nblocks = (n + block_size - 1) // block_size
        self.nblocks = nblocks
        self.samples = np.zeros(nblocks + 1, dtype=np.int32)
        if nblocks:
            self.samples[:nblocks] = before[::block_size]
        leaf_base = 1
        while leaf_base < max(nblocks, 1):
            leaf_base *= 2
        self.leaf_base = leaf_base
        heap = np.full(2 * leaf_base, _INF, dtype=np.int32)
        if nblocks:
            # minimum excess over block positions, block end inclusive, so
            # crossings landing exactly on a block boundary stay visible
            mins = np.minimum.reduceat(before, np.arange(0, n, block_size))
            ends = np.empty(nblocks, dtype=np.int32)
            ends[:nblocks - 1] = self.samples[1:nblocks]
            ends[nblocks - 1] = exc[-1]
            heap[leaf_base:leaf_base + nblocks] = np.minimum(mins, ends)
        width = leaf_base // 2
        while width >= 1:
            lo = width
            heap[lo:2 * lo] = np.minimum(heap[2 * lo:4 * lo:2], heap[2 * lo + 1:4 * lo:2])
            width //= 2
        self.heap = heap

    @classmethod
    def from_string(cls, s, **kw):
        return cls(Bits.from_bools(
            np.frombuffer(s.replace("(", "1").replace(")", "0").encode(), dtype=np.uint8)
            - ord("0")), **kw)

    def _args(self):
        return (self.bits.words, self.bits.counts, self.heap, self.samples,
                self.n, self.block_size, self.leaf_base)

    def __len__(self):
        return self.n

    def excess(self, i):
        if not 0 <= i <= self.n:
            raise IndexError("position out of range")
        return int(bp_excess(self.bits.words, self.bits.counts, i))

    def find_close(self, i):
        if not 0 <= i < self.n or not self.bits.get(i):
            raise ValueError("find_close requires an open parenthesis")
        return int(bp_find_close(*self._args(), i))

    def find_open(self, j):
        if not 0 <= j < self.n or self.bits.get(j):
            raise ValueError("find_open requires a close parenthesis")
        return int(bp_find_open(*self._args(), j))

    def find_close_many(self, qs):
        out = np.empty(len(qs), dtype=np.int64)
        bp_find_close_many(*self._args(), np.asarray(qs, dtype=np.int64), out)
        return out

    def find_open_many(self, qs):
        out = np.empty(len(qs), dtype=np.int64)
        bp_find_open_many(*self._args(), np.asarray(qs, dtype=np.int64), out)
        return out

    def size_in_bits(self):
        out = self.bits.size_in_bits()
        out["mins"] = self.heap.nbytes * 8
        out["samples"] = self.samples.nbytes * 8
        return out
