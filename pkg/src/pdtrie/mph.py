"""Monotone minimal perfect hashing via a path-decomposed hollow trie.

The binary trie is decomposed along left-biased heavy paths and encoded
as DFUDS plus one (skip, direction) pair per open parenthesis.  Pairs
use a gamma-style code: skip+1 loses its leading 1 bit, the mantissa
(MSB-first) and the direction bit go to the payload vector, and the
delimiter vector holds that many zeros then a one, so pair boundaries
are select queries.

A hash walks pairs with a running pointer, skipping pattern bits
blindly and comparing only direction bits.  Mismatches descend: a left
child's index is the number of left children seen, a right child's is
the degree minus the rights seen (they are stored bottom-up).  The
depth-first rank of the final node, minus one per left turn taken, plus
the number of strings in the left subtries of its path (found by one
FindClose to the first right child) is the lexicographic rank.
Non-members land on an arbitrary but in-range value.
"""

import numpy as np
from numba import njit

from .bits import U1, trailing_zeros
from .bitvector import Bits, select1_dense
from .bp import BLOCK_SIZE, BalancedParens, bp_find_close
from .trie import BinaryTrie, decompose_left_biased


def encode_pair(skip, direction):
    """(payload bits, delimiter bits) of one pair, as '0'/'1' strings."""
    if skip < 0:
        raise ValueError("skip must be non-negative")
    m = bin(skip + 1)[3:]  # drop '0b1'
    return m + str(direction), "0" * len(m) + "1"


def decode_pair(payload, delim):
    """Inverse of encode_pair."""
    nb = delim.index("1")
    return (1 << nb) + (int(payload[:nb], 2) if nb else 0) - 1, int(payload[nb])


@njit(cache=True)
def _bit(words, i):
    return np.int64((words[i >> 6] >> np.uint64(i & 63)) & U1)


@njit(cache=True)
def _pattern_bit(q, i, rawbits):
    if rawbits:
        return np.int64(q[i])
    byte = i // 9
    r = i - 9 * byte
    if byte >= q.shape[0]:
        return np.int64(0)  # the terminal bit
    if r == 0:
        return np.int64(1)  # byte marker
    return np.int64((q[byte] >> np.uint64(8 - r)) & np.uint8(1))


@njit(cache=True)
def _hash_one(bpw, bpc, heap, samples, nbits, bs, leaf_base,
              hw, hdense, lw, q, qbits, rawbits):
    pos = np.int64(1)
    nid = np.int64(0)
    bitp = np.int64(0)
    lefts = np.int64(0)
    d = np.int64(0)
    l_seen = np.int64(0)
    while True:
        # degree = run length of opens at pos
        off = pos & 63
        cur = (~bpw[pos >> 6]) >> np.uint64(off)
        d = np.int64(0)
        if cur == np.uint64(0):
            d = 64 - off
            w = (pos >> 6) + 1
            cur = ~bpw[w]
            while cur == np.uint64(0):
                d += 64
                w += 1
                cur = ~bpw[w]
            d += trailing_zeros(cur)
        else:
            d = trailing_zeros(cur)
        l_seen = np.int64(0)
        if d == 0:
            break
        first_pair = pos - 1 - nid
        pp = np.int64(0) if first_pair == 0 else select1_dense(hw, hdense, first_pair - 1) + 1
        r_seen = np.int64(0)
        t = np.int64(0)
        descended = False
        while t < d:
            pe = pp
            while _bit(hw, pe) == 0:
                pe += 1
            nb = pe - pp
            mant = np.int64(0)
            for b in range(pp, pe):
                mant = (mant << 1) | _bit(lw, b)
            skip = (np.int64(1) << nb) + mant - 1
            direction = _bit(lw, pe)
            pp = pe + 1
            newbitp = bitp + skip
            if newbitp >= qbits:
                break  # pattern spent mid-node: stop here
            b = _pattern_bit(q, newbitp, rawbits)
            bitp = newbitp + 1
            if b == direction:
                if direction == 1:
                    l_seen += 1  # passed the left hanger of this step
                else:
                    r_seen += 1
                t += 1
                continue
            # mismatch: descend into the hanger, whose side is b
            if b == 0:
                k = l_seen + 1
                lefts += 1
            else:
                k = d - r_seen
            qabs = pos + (d - k)
            m = bp_find_close(bpw, bpc, heap, samples, nbits, bs, leaf_base, qabs)
            nid = nid + (m - qabs + 1) // 2
            pos = m + 1
            descended = True
            break
        if not descended:
            break
    if d > 0:
        # strings hanging left of this node's path precede ours; count them
        # by jumping to the first right child
        qabs = pos + (d - l_seen - 1)
        m = bp_find_close(bpw, bpc, heap, samples, nbits, bs, leaf_base, qabs)
        corr = (m - qabs + 1) // 2 - 1
    else:
        corr = np.int64(0)
    return nid - lefts + corr


@njit(cache=True)
def _hash_batch(bpw, bpc, heap, samples, nbits, bs, leaf_base,
                hw, hdense, lw, qbuf, qoffsets, rawbits, out):
    for k in range(qoffsets.shape[0] - 1):
        q = qbuf[qoffsets[k]:qoffsets[k + 1]]
        qbits = q.shape[0] if rawbits else 9 * q.shape[0] + 1
        out[k] = _hash_one(bpw, bpc, heap, samples, nbits, bs, leaf_base,
                           hw, hdense, lw, q, qbits, rawbits)


class MonotoneHash:
    """hash(s) = lexicographic rank of s for every member; no strings kept."""

    def __init__(self, bp, skip_delims, skip_payload, count, rawbits=False,
                 node_depths=None):
        self.bp = bp
        self.skip_delims = skip_delims
        self.skip_payload = skip_payload
        self.count = count
        self.rawbits = rawbits
        self.node_depths = node_depths

    @classmethod
    def build(cls, strings, block_size=BLOCK_SIZE):
        """Build from sorted unique byte strings (or a BinaryTrie)."""
        trie = strings if isinstance(strings, BinaryTrie) else BinaryTrie.from_strings(strings)
        return cls._from_trie(trie, block_size, rawbits=getattr(trie, "raw_bits", False))

    @classmethod
    def build_from_bits(cls, bitstrings, block_size=BLOCK_SIZE):
        """Test entry point over raw '0'/'1' strings (no byte transform)."""
        return cls._from_trie(BinaryTrie.from_bitstrings(bitstrings), block_size,
                              rawbits=True)

    @classmethod
    def _from_trie(cls, trie, block_size, rawbits):
        d = decompose_left_biased(trie)
        nwords = (d.bp_len + 63) // 64
        bp = BalancedParens(Bits(d.bp_words[:nwords], d.bp_len), block_size=block_size)
        hwords = (d.high_len + 63) // 64
        delims = Bits(d.high_words[:hwords].copy(), d.high_len, with_rank=False)
        if d.high_len:
            delims.ensure_dense()
        lwords = (d.low_len + 63) // 64
        payload = np.ascontiguousarray(d.low_words[:lwords])
        return cls(bp, delims, payload, d.count, rawbits=rawbits,
                   node_depths=d.depths)

    def __len__(self):
        return self.count

    def _kargs(self):
        dn = self.skip_delims.dense
        if dn is None:
            dn = np.zeros(1, dtype=np.uint32)
        hw = self.skip_delims.words
        if hw.shape[0] == 0:
            hw = np.zeros(1, dtype=np.uint64)
        lw = self.skip_payload
        if lw.shape[0] == 0:
            lw = np.zeros(1, dtype=np.uint64)
        return (*self.bp._args(), hw, dn, lw)

    def hash(self, s):
        """Rank for members; some in-range value for anything else."""
        if self.rawbits:
            q = np.frombuffer(str(s).encode(), dtype=np.uint8) - ord("0")
            qbits = q.shape[0]
        else:
            q = np.frombuffer(bytes(s), dtype=np.uint8)
            qbits = 9 * q.shape[0] + 1
        return int(_hash_one(*self._kargs(), q, qbits, self.rawbits))

    def hash_batch(self, qbuf, qoffsets):
        out = np.empty(qoffsets.shape[0] - 1, dtype=np.int64)
        _hash_batch(*self._kargs(), qbuf, qoffsets, self.rawbits, out)
        return out

    def size_in_bits(self):
        out = {}
        for k, v in self.bp.size_in_bits().items():
            out["bp_" + k] = v
        for k, v in self.skip_delims.size_in_bits().items():
            out["delim_" + k] = v
        out["payload"] = self.skip_payload.nbytes * 8
        return out

    def bits_per_string(self):
        return sum(self.size_in_bits().values()) / max(self.count, 1)
