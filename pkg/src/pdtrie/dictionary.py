"""Succinct string dictionary over a path-decomposed trie.

The trie topology is DFUDS (degree opens then one close per node, depth
first, one leading virtual open to balance the sequence), branching
characters sit in one array aligned with the opens and reversed per
node, and labels live in a sequential-scan store.  Node ids are
depth-first ranks, which for the lexicographic variant equal sorted
ranks.

Navigation needs no rank/select on the hot path: between an open and
its mate there are equally many opens and closes, so child ids follow
from mate distances alone.  With the leading virtual open, node id i
starts right after the (i-1)-th close, its first open at position p has
branch index p - 1 - i, and the child reached through open q starts at
find_close(q) + 1 with id  i + (find_close(q) - q + 1) / 2.
"""

import numpy as np
from numba import njit

from .bitvector import Bits, select0_hinted
from .bp import BalancedParens, bp_find_close, bp_find_open
from .eliasfano import ef_access, ef_pair
from .labels import SPECIAL_BASE, LabelStore, REPAIR_K
from .trie import CompactedTrie, decompose
from .bp import BLOCK_SIZE


@njit(cache=True)
def _next_sym(payload, ppos, pend, wpos, wend, has_dict, dchars, dstarts, dends):
    """Next label symbol, or -1 at the end; constant work per symbol."""
    if wpos < wend:
        return np.int64(dchars[wpos]), ppos, wpos + 1, wend
    if ppos >= pend:
        return np.int64(-1), ppos, wpos, wend
    v = np.int64(0)
    shift = 0
    while True:
        b = np.int64(payload[ppos])
        ppos += 1
        v |= (b & 0x7F) << shift
        if b < 0x80:
            break
        shift += 7
    if has_dict:
        ws = np.int64(dstarts[v])
        return np.int64(dchars[ws]), ppos, ws + 1, np.int64(dends[v])
    return v, ppos, wpos, wend


@njit(cache=True)
def _lookup_one(bpw, bpc, heap, samples, nbits, bs, leaf_base, branch,
                payload, ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints,
                has_dict, dchars, dstarts, dends, q, stats):
    qlen = q.shape[0]
    pos = np.int64(1)
    nid = np.int64(0)
    qi = np.int64(0)
    while True:
        stats[0] += 1
        if nid == 0:
            lo = np.int64(0)
            hi = ef_access(ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints, 0)
        else:
            lo, hi = ef_pair(ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints,
                             nid - 1)
        ppos, pend = lo, hi
        wpos = np.int64(0)
        wend = np.int64(0)
        acc = np.int64(0)
        win_lo = np.int64(0)
        while True:
            sym, ppos, wpos, wend = _next_sym(payload, ppos, pend, wpos, wend,
                                              has_dict, dchars, dstarts, dends)
            if sym < 0:
                # empty label: a leaf entered through its terminator branch
                return nid
            stats[1] += 1
            if sym > SPECIAL_BASE:
                stats[2] += 1
                acc += sym - SPECIAL_BASE
                continue
            qc = np.int64(q[qi]) if qi < qlen else np.int64(0)
            if sym == qc:
                if qi >= qlen:
                    return nid  # matched the terminator
                qi += 1
                win_lo = acc
                continue
            # mismatch: the accumulator delimits the children branching here
            base = pos - 1 - nid
            j = np.int64(-1)
            for t in range(win_lo, acc):
                if np.int64(branch[base + t]) == qc:
                    j = t
                    break
            if j < 0:
                return np.int64(-1)
            qabs = pos + j
            m = bp_find_close(bpw, bpc, heap, samples, nbits, bs, leaf_base, qabs)
            nid = nid + (m - qabs + 1) // 2
            pos = m + 1
            if qi >= qlen:
                return nid  # descended through the terminator branch
            qi += 1
            break


@njit(cache=True)
def _lookup_batch(bpw, bpc, heap, samples, nbits, bs, leaf_base, branch,
                  payload, ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints,
                  has_dict, dchars, dstarts, dends, qbuf, qoffsets, out):
    stats = np.zeros(3, dtype=np.int64)
    for k in range(qoffsets.shape[0] - 1):
        out[k] = _lookup_one(
            bpw, bpc, heap, samples, nbits, bs, leaf_base, branch,
            payload, ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints,
            has_dict, dchars, dstarts, dends,
            qbuf[qoffsets[k]:qoffsets[k + 1]], stats)


@njit(cache=True)
def _access_batch(bpw, bpc, heap, samples, nbits, bs, leaf_base, sel0, branch,
                  payload, ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints,
                  has_dict, dchars, dstarts, dends, ids):
    out = np.empty(256, dtype=np.uint8)
    w = np.int64(0)
    ends = np.empty(ids.shape[0], dtype=np.int64)
    chain_j = np.empty(64, dtype=np.int64)
    chain_id = np.empty(64, dtype=np.int64)
    chain_base = np.empty(64, dtype=np.int64)
    for qk in range(ids.shape[0]):
        nid = ids[qk]
        cur = nid
        pos = select0_hinted(bpw, bpc, sel0, cur - 1) + 1 if cur > 0 else np.int64(1)
        depth = np.int64(0)
        while cur != 0:
            if depth >= chain_j.shape[0]:
                nj = np.empty(chain_j.shape[0] * 2, dtype=np.int64)
                ni = np.empty(chain_j.shape[0] * 2, dtype=np.int64)
                nb = np.empty(chain_j.shape[0] * 2, dtype=np.int64)
                nj[:depth] = chain_j[:depth]
                ni[:depth] = chain_id[:depth]
                nb[:depth] = chain_base[:depth]
                chain_j, chain_id, chain_base = nj, ni, nb
            j = bp_find_open(bpw, bpc, heap, samples, nbits, bs, leaf_base, pos - 1)
            parent = cur - (pos - j) // 2
            ppos = select0_hinted(bpw, bpc, sel0, parent - 1) + 1 if parent > 0 else np.int64(1)
            chain_j[depth] = j - ppos
            chain_id[depth] = parent
            chain_base[depth] = ppos - 1 - parent
            depth += 1
            cur = parent
            pos = ppos
        # replay top-down: each ancestor contributes the label prefix up to
        # where we branched off, then the branching character
        for t in range(depth - 1, -1, -1):
            a = chain_id[t]
            jidx = chain_j[t]
            if a == 0:
                lo = np.int64(0)
                hi = ef_access(ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints, 0)
            else:
                lo, hi = ef_pair(ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt,
                                 ep_hints, a - 1)
            ppos, pend = lo, hi
            wpos = np.int64(0)
            wend = np.int64(0)
            acc = np.int64(0)
            while acc <= jidx:
                sym, ppos, wpos, wend = _next_sym(payload, ppos, pend, wpos, wend,
                                                  has_dict, dchars, dstarts, dends)
                if sym < 0:
                    break
                if sym > SPECIAL_BASE:
                    acc += sym - SPECIAL_BASE
                    continue
                if w >= out.shape[0]:
                    grown = np.empty(out.shape[0] * 2, dtype=np.uint8)
                    grown[:w] = out
                    out = grown
                out[w] = np.uint8(sym)
                w += 1
            c = branch[chain_base[t] + jidx]
            if c != 0:  # a terminator branch adds no content
                if w >= out.shape[0]:
                    grown = np.empty(out.shape[0] * 2, dtype=np.uint8)
                    grown[:w] = out
                    out = grown
                out[w] = c
                w += 1
        # the node's own label: all normal symbols except the terminator
        if nid == 0:
            lo = np.int64(0)
            hi = ef_access(ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints, 0)
        else:
            lo, hi = ef_pair(ep_low, ep_lb, ep_hw, ep_kind, ep_dense, ep_cnt, ep_hints,
                             nid - 1)
        ppos, pend = lo, hi
        wpos = np.int64(0)
        wend = np.int64(0)
        while True:
            sym, ppos, wpos, wend = _next_sym(payload, ppos, pend, wpos, wend,
                                              has_dict, dchars, dstarts, dends)
            if sym <= 0:
                break
            if sym > SPECIAL_BASE:
                continue
            if w >= out.shape[0]:
                grown = np.empty(out.shape[0] * 2, dtype=np.uint8)
                grown[:w] = out
                out = grown
            out[w] = np.uint8(sym)
            w += 1
        ends[qk] = w
    return out, ends


class StringDictionary:
    """Bidirectional string <-> id mapping with compressed labels."""

    def __init__(self, bp, branch, labels, count, strategy, node_depths=None):
        self.bp = bp
        self.branch = branch
        self.labels = labels
        self.count = count
        self.strategy = strategy
        self.node_depths = node_depths

    @classmethod
    def build(cls, strings, strategy="centroid", compress=False,
              repair_k=REPAIR_K, block_size=BLOCK_SIZE):
        """Build from sorted unique byte strings (or a CompactedTrie)."""
        if strategy not in ("lex", "centroid"):
            raise ValueError("strategy must be 'lex' or 'centroid'")
        trie = strings if isinstance(strings, CompactedTrie) \
            else CompactedTrie.from_strings(strings)
        d = decompose(trie, "heavy" if strategy == "centroid" else "leftmost")
        nwords = (d.bp_len + 63) // 64
        bp = BalancedParens(Bits(d.bp_words[:nwords], d.bp_len), block_size=block_size)
        bp.bits.ensure_select0()
        labels = LabelStore.build(d.label_syms, d.label_ends, compress=compress,
                                  repair_k=repair_k)
        return cls(bp, d.branch, labels, d.count, strategy, node_depths=d.depths)

    def __len__(self):
        return self.count

    @property
    def compressed(self):
        return self.labels.compressed

    def _kargs(self):
        return (*self.bp._args(), self.branch, *self.labels.kernel_args())

    def lookup(self, s):
        """Id of s, or -1 when absent."""
        q = np.frombuffer(bytes(s), dtype=np.uint8)
        if q.shape[0] and 0 in q:
            return -1  # the terminator byte cannot occur in stored strings
        stats = np.zeros(3, dtype=np.int64)
        return int(_lookup_one(*self._kargs(), q, stats))

    def lookup_stats(self, s):
        """(id, nodes visited, symbols scanned, specials scanned)."""
        q = np.frombuffer(bytes(s), dtype=np.uint8)
        stats = np.zeros(3, dtype=np.int64)
        r = int(_lookup_one(*self._kargs(), q, stats))
        return r, int(stats[0]), int(stats[1]), int(stats[2])

    def lookup_batch(self, qbuf, qoffsets):
        """Ids for queries packed as one buffer plus offsets."""
        out = np.empty(qoffsets.shape[0] - 1, dtype=np.int64)
        _lookup_batch(*self._kargs(), qbuf, qoffsets, out)
        return out

    def access(self, i):
        """The string with id i."""
        return self.access_batch(np.array([i], dtype=np.int64))[0]

    def access_batch(self, ids):
        ids = np.asarray(ids, dtype=np.int64)
        if ids.shape[0] and (int(ids.min()) < 0 or int(ids.max()) >= self.count):
            raise IndexError("id out of range")
        buf, ends = _access_batch(*self.bp._args(), self.bp.bits.sel0, self.branch,
                                  *self.labels.kernel_args(), ids)
        out = []
        lo = 0
        for e in ends:
            out.append(buf[lo:e].tobytes())
            lo = e
        return out

    def size_in_bits(self):
        out = {"branch": self.branch.nbytes * 8}
        for k, v in self.bp.size_in_bits().items():
            out["bp_" + k] = v
        for k, v in self.labels.size_in_bits().items():
            out["lab_" + k] = v
        return out

    def size_in_bytes(self):
        return sum(self.size_in_bits().values()) // 8
