"""Construction-time tries and path decompositions.

Builders operate on a sorted, unique string set packed as one byte
buffer plus offsets.  The compacted trie is materialized as an
LCP-interval tree over adjacent-pair longest-common-prefix lengths:
internal nodes are branch points, labels are slices of a representative
string, so no label bytes are copied.  The same machinery builds the
binary (hollow-source) trie from bit-level LCPs computed directly on
the bytes, without materializing the binarized strings.

Child references are encoded in one integer space: leaf j is ref j,
internal k is ref num_strings + k.

Decomposition emitters walk every root-to-leaf chosen path with an
explicit stack (no recursion; synthetic corpora exceed depth 1000) and
flatten the result into the streams consumed by the query structures:
a DFUDS parenthesis stream (with one leading virtual open so the
sequence is balanced), per-node reversed branching characters, and the
label symbol stream over the augmented alphabet.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bits import U1

TERMINATOR = 0
NONE = np.int64(-1)


# ---------------------------------------------------------------------------
# string packing

def pack_strings(strings):
    """Pack an iterable of byte strings into (buf, offsets)."""
    offsets = np.zeros(len(strings) + 1, dtype=np.int64)
    for i, s in enumerate(strings):
        offsets[i + 1] = offsets[i] + len(s)
    buf = np.empty(offsets[-1], dtype=np.uint8)
    for i, s in enumerate(strings):
        buf[offsets[i]:offsets[i + 1]] = np.frombuffer(bytes(s), dtype=np.uint8)
    return buf, offsets


def unpack_strings(buf, offsets):
    return [buf[offsets[i]:offsets[i + 1]].tobytes() for i in range(len(offsets) - 1)]


@njit(cache=True)
def _byte_lcps(buf, offsets):
    """LCP of each adjacent pair; status 1 = unsorted, 2 = duplicate."""
    n = offsets.shape[0] - 1
    out = np.empty(max(n - 1, 1), dtype=np.int64)
    for i in range(1, n):
        a0, a1 = offsets[i - 1], offsets[i]
        b0, b1 = offsets[i], offsets[i + 1]
        la, lb = a1 - a0, b1 - b0
        m = min(la, lb)
        p = 0
        while p < m and buf[a0 + p] == buf[b0 + p]:
            p += 1
        if p == m:
            if la == lb:
                return out, 2
            if la > lb:
                return out, 1
        elif buf[a0 + p] > buf[b0 + p]:
            return out, 1
        out[i - 1] = p
    return out, 0


@njit(cache=True)
def _bit_lcps(buf, offsets):
    """Bit-level LCPs of the prefix-free transform (1 + 8 bits per byte,
    MSB-first, one trailing 0) computed straight from the bytes."""
    n = offsets.shape[0] - 1
    out = np.empty(max(n - 1, 1), dtype=np.int64)
    for i in range(1, n):
        a0, a1 = offsets[i - 1], offsets[i]
        b0, b1 = offsets[i], offsets[i + 1]
        la, lb = a1 - a0, b1 - b0
        m = min(la, lb)
        p = 0
        while p < m and buf[a0 + p] == buf[b0 + p]:
            p += 1
        if p == m:
            if la == lb:
                return out, 2
            if la > lb:
                return out, 1
            out[i - 1] = 9 * p  # shorter string ends with 0, longer goes 1
        else:
            x, y = buf[a0 + p], buf[b0 + p]
            if x > y:
                return out, 1
            z = x ^ y
            bl = 0
            while z:
                z >>= 1
                bl += 1
            out[i - 1] = 9 * p + 1 + (8 - bl)
    return out, 0


# ---------------------------------------------------------------------------
# LCP-interval tree

@njit(cache=True)
def _interval_tree(lcps, n):
    """Build the compacted trie of n sorted unique strings from adjacent
    LCPs; internal nodes are the branch points of the string set."""
    cap = max(n, 2)
    depth = np.zeros(cap, dtype=np.int64)
    first_leaf = np.zeros(cap, dtype=np.int64)
    last_leaf = np.zeros(cap, dtype=np.int64)
    head = np.full(cap, NONE)
    tail = np.full(cap, NONE)
    nchild = np.zeros(cap, dtype=np.int64)
    sib = np.full(2 * cap, NONE)  # indexed by ref

    nn = 0
    stack = np.empty(cap + 1, dtype=np.int64)  # open internal node ids
    sp = 0

    for i in range(1, n):
        l = lcps[i - 1]
        cur = np.int64(i - 1)  # leaf i-1
        while sp > 0 and depth[stack[sp - 1]] > l:
            v = stack[sp - 1]
            sp -= 1
            # attach cur as last child of v
            if tail[v] == NONE:
                head[v] = cur
            else:
                sib[tail[v]] = cur
            tail[v] = cur
            nchild[v] += 1
            last_leaf[v] = i - 1
            cur = np.int64(n + v)
        if sp > 0 and depth[stack[sp - 1]] == l:
            v = stack[sp - 1]
            if tail[v] == NONE:
                head[v] = cur
            else:
                sib[tail[v]] = cur
            tail[v] = cur
            nchild[v] += 1
            last_leaf[v] = i - 1
        else:
            v = nn
            nn += 1
            depth[v] = l
            first_leaf[v] = i - 1 if cur < n else first_leaf[cur - n]
            head[v] = cur
            tail[v] = cur
            nchild[v] = 1
            stack[sp] = v
            sp += 1
    cur = np.int64(n - 1)
    while sp > 0:
        v = stack[sp - 1]
        sp -= 1
        if tail[v] == NONE:
            head[v] = cur
        else:
            sib[tail[v]] = cur
        tail[v] = cur
        nchild[v] += 1
        last_leaf[v] = n - 1
        cur = np.int64(n + v)
    root = cur  # leaf 0 when n == 1
    return depth, first_leaf, last_leaf, head, nchild, sib, nn, root


class _TrieBase:
    """Array-backed compacted trie shared by byte and binary flavours."""

    def __init__(self, buf, offsets, lcps):
        self.buf = buf
        self.offsets = offsets
        n = len(offsets) - 1
        if n == 0:
            raise ValueError("empty string set")
        self.n = n
        self.lcps = lcps
        (self.depth, self.first_leaf, self.last_leaf, self.head,
         self.nchild, self.sib, self.nnodes, self.root) = _interval_tree(lcps, n)

    @property
    def num_leaves(self):
        return self.n

    @property
    def num_internal(self):
        return int(self.nnodes)

    def is_leaf(self, ref):
        return ref < self.n

    def children(self, ref):
        """Child refs of an internal node, in branch-char order."""
        out = []
        c = self.head[ref - self.n]
        while c != NONE:
            out.append(int(c))
            c = self.sib[c]
        return out

    def leaf_count(self, ref):
        if ref < self.n:
            return 1
        v = ref - self.n
        return int(self.last_leaf[v] - self.first_leaf[v] + 1)

    def rep_leaf(self, ref):
        return int(ref) if ref < self.n else int(self.first_leaf[ref - self.n])

    def node_depth(self, ref):
        if ref < self.n:
            return int(self.offsets[ref + 1] - self.offsets[ref])
        return int(self.depth[ref - self.n])

    def leaf_node_depths(self):
        """Number of internal ancestors of each leaf (its height in the trie)."""
        out = np.zeros(self.n, dtype=np.int64)
        _leaf_depths(self.head, self.sib, self.n, self.root, out)
        return out


@njit(cache=True)
def _leaf_depths(head, sib, n, root, out):
    stack_ref = np.empty(2 * n + 2, dtype=np.int64)
    stack_dep = np.empty(2 * n + 2, dtype=np.int64)
    sp = 0
    stack_ref[0] = root
    stack_dep[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        r = stack_ref[sp]
        d = stack_dep[sp]
        if r < n:
            out[r] = d
        else:
            c = head[r - n]
            while c != NONE:
                stack_ref[sp] = c
                stack_dep[sp] = d + 1
                sp += 1
                c = sib[c]


class CompactedTrie(_TrieBase):
    """Compacted trie over byte strings with a logical 0x00 terminator."""

    def __init__(self, buf, offsets):
        buf = np.ascontiguousarray(buf, dtype=np.uint8)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        if buf.shape[0] and int(buf.min()) == TERMINATOR:
            raise ValueError("strings must not contain the 0x00 terminator")
        lcps, status = _byte_lcps(buf, offsets)
        if status == 1:
            raise ValueError("strings are not sorted")
        if status == 2:
            raise ValueError("duplicate string")
        super().__init__(buf, offsets, lcps)

    @classmethod
    def from_strings(cls, strings):
        return cls(*pack_strings(strings))

    def branch_char(self, parent_ref, child_ref):
        """Edge character from an internal node to one of its children."""
        d = self.depth[parent_ref - self.n]
        rep = self.rep_leaf(child_ref)
        length = self.offsets[rep + 1] - self.offsets[rep]
        if d >= length:
            return TERMINATOR
        return int(self.buf[self.offsets[rep] + d])

    def label_of(self, ref, start=0):
        """Node label from byte position ``start``; leaf labels carry the
        logical terminator unless it was consumed as their branching char."""
        rep = self.rep_leaf(ref)
        base = self.offsets[rep]
        if ref < self.n:
            out = self.buf[base + start:self.offsets[ref + 1]].tobytes()
            if start <= self.offsets[ref + 1] - base:
                out += b"\x00"
            return out
        return self.buf[base + start:base + self.depth[ref - self.n]].tobytes()


class BinaryTrie(_TrieBase):
    """Binary compacted trie over the prefix-free bit transform; stores
    topology and skips only (leaves carry nothing)."""

    def __init__(self, buf, offsets, lcps=None):
        buf = np.ascontiguousarray(buf, dtype=np.uint8)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        if lcps is None:
            if buf.shape[0] and int(buf.min()) == 0:
                raise ValueError("strings must not contain the 0x00 terminator")
            lcps, status = _bit_lcps(buf, offsets)
            if status == 1:
                raise ValueError("strings are not sorted")
            if status == 2:
                raise ValueError("duplicate string")
        super().__init__(buf, offsets, lcps)
        # binary trie: every internal node has exactly two children
        if self.nnodes and int(self.nchild[:self.nnodes].max()) > 2:
            raise AssertionError("binary trie with degree > 2")

    @classmethod
    def from_strings(cls, strings):
        return cls(*pack_strings(strings))

    @classmethod
    def from_bitstrings(cls, bitstrings):
        """Test entry point: build from '0'/'1' strings, no byte transform."""
        strs = sorted(bitstrings)
        if len(set(strs)) != len(strs):
            raise ValueError("duplicate string")
        if strs != list(bitstrings):
            raise ValueError("strings are not sorted")
        lcps = np.empty(max(len(strs) - 1, 1), dtype=np.int64)
        for i in range(1, len(strs)):
            a, b = strs[i - 1], strs[i]
            p = 0
            while p < min(len(a), len(b)) and a[p] == b[p]:
                p += 1
            if p == len(a):  # prefix: shorter ends (0 bit), longer continues
                raise ValueError("bit strings must be prefix-free")
            lcps[i - 1] = p
        buf, offsets = pack_strings([s.encode() for s in strs])
        t = cls(buf, offsets, lcps=lcps)
        t.raw_bits = True
        return t

    def skip_of(self, ref, parent_depth):
        return self.node_depth(ref) - parent_depth

    def skips(self):
        """Skips of internal nodes in an arbitrary fixed order (node id)."""
        out = np.empty(self.nnodes, dtype=np.int64)
        for v in range(self.nnodes):
            out[v] = self.depth[v]
        return out


# ---------------------------------------------------------------------------
# path decompositions

SPECIAL_BASE = 255  # symbol 255 + k encodes k hanging subtries, k in [1, 256]


@dataclass
class DictDecomp:
    """Flattened dictionary-style path decomposition (one node per string)."""
    count: int
    bp_words: np.ndarray
    bp_len: int
    branch: np.ndarray       # uint8, one char per '(' of the DFUDS
    label_syms: np.ndarray   # uint16 symbols over the augmented alphabet
    label_ends: np.ndarray   # int64 end offset per node, DFS order
    depths: np.ndarray       # int32 node depth in the decomposition tree


@dataclass
class HollowDecomp:
    """Flattened hollow-trie path decomposition."""
    count: int
    bp_words: np.ndarray
    bp_len: int
    low_words: np.ndarray    # skip mantissas interleaved with direction bits
    low_len: int
    high_words: np.ndarray   # 0^len(mantissa) 1 delimiters, aligned with low
    high_len: int
    depths: np.ndarray


@njit(cache=True)
def _append_ones(words, pos, count):
    while count > 0:
        off = pos & 63
        room = 64 - off
        c = count if count < room else room
        if c == 64:
            words[pos >> 6] = np.uint64(0xFFFFFFFFFFFFFFFF)
        else:
            words[pos >> 6] |= ((U1 << np.uint64(c)) - U1) << np.uint64(off)
        pos += c
        count -= c
    return pos


@njit(cache=True)
def _append_bits(words, pos, value, nbits):
    off = pos & 63
    words[pos >> 6] |= np.uint64(value) << np.uint64(off)
    if off + nbits > 64:
        words[(pos >> 6) + 1] |= np.uint64(value) >> np.uint64(64 - off)
    return pos + nbits


@njit(cache=True)
def _emit_dict(buf, offsets, depth, first_leaf, last_leaf, head, nchild, sib,
               nnodes, root, heavy, syms_cap):
    n = offsets.shape[0] - 1
    bp_words = np.zeros((2 * n + 63) // 64 + 1, dtype=np.uint64)
    branch = np.zeros(max(n - 1, 1), dtype=np.uint8)
    syms = np.zeros(syms_cap, dtype=np.uint16)
    ends = np.zeros(n, dtype=np.int64)
    depths = np.zeros(n, dtype=np.int32)

    stack_ref = np.empty(n + 2, dtype=np.int64)
    stack_start = np.empty(n + 2, dtype=np.int64)
    stack_dep = np.empty(n + 2, dtype=np.int32)
    tmp = np.empty(260, dtype=np.int64)

    bp_pos = _append_ones(bp_words, 0, 1)  # virtual super-root open
    bpos = 0
    spos = 0
    tc = 0
    stack_ref[0] = root
    stack_start[0] = 0
    stack_dep[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        r = stack_ref[sp]
        start = stack_start[sp]
        dep = stack_dep[sp]
        deg = 0
        while r >= n:
            v = r - n
            rep = first_leaf[v]
            base = offsets[rep]
            if spos + (depth[v] - start) + 4 > syms.shape[0]:
                grown = np.zeros(syms.shape[0] * 2 + (depth[v] - start) + 4,
                                 dtype=np.uint16)
                grown[:spos] = syms[:spos]
                syms = grown
            for pos in range(start, depth[v]):
                syms[spos] = buf[base + pos]
                spos += 1
            # choose the path child
            if heavy:
                pc = head[v]
                best = last_leaf[pc - n] - first_leaf[pc - n] + 1 if pc >= n else np.int64(1)
                c = sib[pc]
                while c != NONE:
                    cnt = last_leaf[c - n] - first_leaf[c - n] + 1 if c >= n else np.int64(1)
                    if cnt > best:
                        best = cnt
                        pc = c
                    c = sib[c]
            else:
                pc = head[v]
            # specials: hanging-subtrie count, split in chunks of 256
            k = nchild[v] - 1
            while k > 0:
                c = k if k < 256 else np.int64(256)
                syms[spos] = SPECIAL_BASE + c
                spos += 1
                k -= c
            # path branching char
            if pc < n:
                plen = offsets[pc + 1] - offsets[pc]
                syms[spos] = buf[offsets[pc] + depth[v]] if depth[v] < plen else TERMINATOR
            else:
                syms[spos] = buf[offsets[first_leaf[pc - n]] + depth[v]]
            spos += 1
            # hangers in reverse child order: emitted to the branch array and
            # pushed so that the bottom-most, smallest-char child pops first
            cnt = 0
            c = head[v]
            while c != NONE:
                if c != pc:
                    tmp[cnt] = c
                    cnt += 1
                c = sib[c]
            for t in range(cnt - 1, -1, -1):
                h = tmp[t]
                if h < n:
                    hlen = offsets[h + 1] - offsets[h]
                    branch[bpos] = buf[offsets[h] + depth[v]] if depth[v] < hlen else TERMINATOR
                else:
                    branch[bpos] = buf[offsets[first_leaf[h - n]] + depth[v]]
                bpos += 1
                stack_ref[sp] = h
                stack_start[sp] = depth[v] + 1
                stack_dep[sp] = dep + 1
                sp += 1
                deg += 1
            start = depth[v] + 1
            r = pc
        # leaf: remaining bytes plus the terminator, unless the terminator
        # itself was consumed as the branching character into this leaf
        llen = offsets[r + 1] - offsets[r]
        if spos + (llen - start) + 2 > syms.shape[0]:
            grown = np.zeros(syms.shape[0] * 2 + (llen - start) + 2, dtype=np.uint16)
            grown[:spos] = syms[:spos]
            syms = grown
        base = offsets[r]
        for pos in range(start, llen):
            syms[spos] = buf[base + pos]
            spos += 1
        if start <= llen:
            syms[spos] = TERMINATOR
            spos += 1
        ends[tc] = spos
        depths[tc] = dep
        bp_pos = _append_ones(bp_words, bp_pos, deg)
        bp_pos += 1  # the closing parenthesis (words are pre-zeroed)
        tc += 1
    return bp_words, bp_pos, branch, syms, spos, ends, depths


def decompose(trie, strategy):
    """Path-decompose a compacted trie; strategy 'leftmost' or 'heavy'."""
    if strategy not in ("leftmost", "heavy"):
        raise ValueError("strategy must be 'leftmost' or 'heavy'")
    n = trie.n
    cap = int(trie.offsets[-1]) + 4 * n + 64
    bp_words, bp_len, branch, syms, spos, ends, depths = _emit_dict(
        trie.buf, trie.offsets, trie.depth, trie.first_leaf, trie.last_leaf,
        trie.head, trie.nchild, trie.sib, trie.nnodes, trie.root,
        strategy == "heavy", cap)
    return DictDecomp(n, bp_words, int(bp_len), branch[:n - 1] if n > 1 else branch[:0],
                      syms[:spos], ends, depths)


@njit(cache=True)
def _emit_hollow(offsets, depth, first_leaf, last_leaf, head, nchild, sib,
                 nnodes, root, pair_bits_cap, max_path):
    n = offsets.shape[0] - 1
    bp_words = np.zeros((2 * n + 63) // 64 + 1, dtype=np.uint64)
    low_words = np.zeros(pair_bits_cap // 64 + 2, dtype=np.uint64)
    high_words = np.zeros(pair_bits_cap // 64 + 2, dtype=np.uint64)
    depths = np.zeros(n, dtype=np.int32)

    stack_ref = np.empty(n + 2, dtype=np.int64)
    stack_start = np.empty(n + 2, dtype=np.int64)
    stack_dep = np.empty(n + 2, dtype=np.int32)
    lefts = np.empty(max_path + 2, dtype=np.int64)
    lefts_start = np.empty(max_path + 2, dtype=np.int64)

    bp_pos = _append_ones(bp_words, 0, 1)
    lo_pos = 0
    hi_pos = 0
    tc = 0
    stack_ref[0] = root
    stack_start[0] = 0
    stack_dep[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        r = stack_ref[sp]
        start = stack_start[sp]
        dep = stack_dep[sp]
        deg = 0
        nlefts = 0
        while r >= n:
            v = r - n
            c0 = head[v]
            c1 = sib[c0]
            n0 = last_leaf[c0 - n] - first_leaf[c0 - n] + 1 if c0 >= n else np.int64(1)
            n1 = last_leaf[c1 - n] - first_leaf[c1 - n] + 1 if c1 >= n else np.int64(1)
            if n1 > n0:  # ties go left
                pc, hang, direction = c1, c0, 1
            else:
                pc, hang, direction = c0, c1, 0
            # gamma-style pair: mantissa of (skip+1) without its leading 1,
            # MSB-first, then the direction bit; high marks the last bit
            skip = depth[v] - start
            sk1 = skip + 1
            nb = 0
            t = sk1
            while t > 1:
                t >>= 1
                nb += 1
            mant = sk1 - (np.int64(1) << nb)
            for b in range(nb - 1, -1, -1):
                lo_pos = _append_bits(low_words, lo_pos, (mant >> b) & 1, 1)
            lo_pos = _append_bits(low_words, lo_pos, direction, 1)
            hi_pos += nb  # zeros
            hi_pos = _append_ones(high_words, hi_pos, 1)
            if direction == 1:
                lefts[nlefts] = hang  # hanger sits on the left of the path
                lefts_start[nlefts] = depth[v] + 1
                nlefts += 1
            else:
                stack_ref[sp] = hang  # right hangers push in walk order
                stack_start[sp] = depth[v] + 1
                stack_dep[sp] = dep + 1
                sp += 1
            deg += 1
            start = depth[v] + 1
            r = pc
        for t in range(nlefts - 1, -1, -1):  # left hangers pop top-to-bottom
            stack_ref[sp] = lefts[t]
            stack_start[sp] = lefts_start[t]
            stack_dep[sp] = dep + 1
            sp += 1
        depths[tc] = dep
        bp_pos = _append_ones(bp_words, bp_pos, deg)
        bp_pos += 1
        tc += 1
    return bp_words, bp_pos, low_words, lo_pos, high_words, hi_pos, depths


def decompose_left_biased(btrie):
    """Left-biased heavy-path decomposition of a binary trie; children are
    arranged lexicographically (left subtries top-down, then right ones
    bottom-up), so node ids preserve string order."""
    n = btrie.n
    max_depth = int(btrie.depth[:btrie.nnodes].max()) if btrie.nnodes else 0
    pair_bits = (max_depth + 2).bit_length() + 1
    cap = max(btrie.nnodes, 1) * pair_bits + 128
    bp_words, bp_len, low_words, low_len, high_words, high_len, depths = _emit_hollow(
        btrie.offsets, btrie.depth, btrie.first_leaf, btrie.last_leaf,
        btrie.head, btrie.nchild, btrie.sib, btrie.nnodes, btrie.root,
        cap, max_depth + 2)
    return HollowDecomp(n, bp_words, int(bp_len), low_words, int(low_len),
                        high_words, int(high_len), depths)
