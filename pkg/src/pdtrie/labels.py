"""Label encoding over the augmented alphabet, vbyte, and dictionary
compression driven by approximate pair substitution.

Symbols are integers in [0, 512): values below 256 are literal bytes
(0 is the logical terminator), value 255 + k marks a branch point with k
hanging subtries, k in [1, 256].  Larger counts split into consecutive
specials that sum to the degree, so an accumulator scanning the label
sees the same totals.

The compression scheme is a static dictionary of variable-sized words
stored flat (16-bit characters, 16-bit endpoints, total size capped so
endpoints fit in 16 bits).  Each round counts adjacent code pairs over
all labels, takes the k most frequent ones that still fit, substitutes
them left-to-right without crossing label boundaries, and repeats until
the dictionary fills up or no pair repeats.  Codes are finally assigned
by decreasing frequency in the parsing, ties broken by first appearance.
"""

import numpy as np
from numba import njit

from .eliasfano import EliasFano

SPECIAL_BASE = 255          # symbol 255 + k encodes k hanging subtries
SIGMA_PRIME = 512
DICT_BUDGET = 2**16 - 1     # word endpoints must fit in 16 bits
REPAIR_K = 256
_SENT = np.int32(-1)


def special(count):
    """Symbols encoding a hanging-subtrie count (split above 256)."""
    if count < 1:
        raise ValueError("special symbols encode counts >= 1")
    out = []
    while count > 0:
        c = min(count, 256)
        out.append(SPECIAL_BASE + c)
        count -= c
    return out


def encode_label(path):
    """Symbol sequence of one decomposition-node label.

    ``path`` is a list of (alpha, hanging_count, branch_char) triples for
    the path nodes; the last entry must have hanging_count None and
    carries only its alpha (the leaf tail, terminator included).
    """
    out = []
    for alpha, count, branch_char in path[:-1]:
        out.extend(alpha)
        if count:
            out.extend(special(count))
        out.append(branch_char)
    out.extend(path[-1][0])
    return out


# ---------------------------------------------------------------------------
# vbyte

def vbyte_encode(v):
    """Little-endian 7-bit groups; the high bit marks continuation."""
    if not 0 <= v < 2**56:
        raise ValueError("value out of vbyte range")
    out = bytearray()
    while True:
        if v < 0x80:
            out.append(v)
            return bytes(out)
        out.append((v & 0x7F) | 0x80)
        v >>= 7


def vbyte_decode(buf, pos=0):
    """Returns (value, bytes consumed)."""
    v = 0
    shift = 0
    k = pos
    while True:
        if k >= len(buf):
            raise ValueError("truncated vbyte stream")
        b = int(buf[k])
        v |= (b & 0x7F) << shift
        k += 1
        if not b & 0x80:
            return v, k - pos
        shift += 7


@njit(cache=True)
def _vbyte_stream(vals, out):
    """Encode int32 values; returns bytes written (out may be oversized)."""
    w = 0
    for i in range(vals.shape[0]):
        v = vals[i]
        while v >= 0x80:
            out[w] = (v & 0x7F) | 0x80
            w += 1
            v >>= 7
        out[w] = v
        w += 1
    return w


def _vbyte_ends(vals, ends):
    """Byte offset of each label end given symbol-count ends."""
    widths = np.ones(vals.shape[0], dtype=np.int64)
    for bound in (1 << 7, 1 << 14, 1 << 21, 1 << 28):
        widths += vals >= bound
    cum = np.cumsum(widths)
    return np.where(ends > 0, cum[np.maximum(ends, 1) - 1], 0)


# ---------------------------------------------------------------------------
# approximate re-pair

@njit(cache=True)
def _count_pairs(seq, n, cap):
    """Open-addressing count of adjacent code pairs; pairs touching the
    label sentinel are skipped.  Returns (keys, counts, ok)."""
    mask = cap - 1
    keys = np.full(cap, np.int64(-1))
    cnts = np.zeros(cap, dtype=np.int64)
    used = 0
    limit = (cap >> 2) * 3
    for i in range(n - 1):
        a = seq[i]
        b = seq[i + 1]
        if a < 0 or b < 0:
            continue
        key = (np.int64(a) << 32) | np.int64(b)
        h = (key * np.int64(-7046029254386353131)) & mask  # golden-ratio mix
        while True:
            k = keys[h]
            if k == key:
                cnts[h] += 1
                break
            if k == -1:
                if used >= limit:
                    return keys, cnts, False
                keys[h] = key
                cnts[h] = 1
                used += 1
                break
            h = (h + 1) & mask
    return keys, cnts, True


@njit(cache=True)
def _substitute(seq, n, pair_keys, pair_codes):
    """Greedy left-to-right replacement of selected pairs; in place,
    returns the new length."""
    w = 0
    i = 0
    npairs = pair_keys.shape[0]
    while i < n:
        a = seq[i]
        if a >= 0 and i + 1 < n and seq[i + 1] >= 0:
            key = (np.int64(a) << 32) | np.int64(seq[i + 1])
            j = np.searchsorted(pair_keys, key)
            if j < npairs and pair_keys[j] == key:
                seq[w] = pair_codes[j]
                w += 1
                i += 2
                continue
        seq[w] = a
        w += 1
        i += 1
    return w


@njit(cache=True)
def _interleave(syms, ends, seq, code_of):
    pos = 0
    start = np.int64(0)
    for i in range(ends.shape[0]):
        for j in range(start, ends[i]):
            seq[pos] = code_of[syms[j]]
            pos += 1
        if i + 1 < ends.shape[0]:
            seq[pos] = _SENT
            pos += 1
        start = ends[i]
    return pos


class CodeDictionary:
    """Flat word dictionary: word i spans chars[ends[i-1]:ends[i]]."""

    def __init__(self, chars, ends):
        self.chars = np.ascontiguousarray(chars, dtype=np.uint16)
        self.ends = np.ascontiguousarray(ends, dtype=np.uint16)
        if self.chars.shape[0] > DICT_BUDGET:
            raise ValueError("dictionary exceeds its size budget")

    def __len__(self):
        return self.ends.shape[0]

    def word(self, i):
        lo = int(self.ends[i - 1]) if i else 0
        return self.chars[lo:int(self.ends[i])]

    def bounds(self):
        """(starts, ends) as int64 arrays for the scan kernels."""
        ends = self.ends.astype(np.int64)
        starts = np.concatenate([[0], ends[:-1]])
        return starts, ends

    def size_in_bits(self):
        return (self.chars.nbytes + self.ends.nbytes) * 8


def repair_build(syms, ends, k=REPAIR_K, budget=DICT_BUDGET):
    """Parse labels into dictionary words.

    Returns (CodeDictionary, codes int32 stream, code_ends int64) where
    codes are assigned in decreasing order of final parse frequency.
    """
    syms = np.ascontiguousarray(syms, dtype=np.uint16)
    ends = np.ascontiguousarray(ends, dtype=np.int64)
    nlabels = ends.shape[0]
    if nlabels == 0:
        raise ValueError("no labels to parse")
    used = np.unique(syms) if syms.shape[0] else np.zeros(0, dtype=np.uint16)
    code_of = np.full(SIGMA_PRIME, -1, dtype=np.int32)
    code_of[used] = np.arange(used.shape[0], dtype=np.int32)
    # provisional dictionary: singles first (symbol order = first appearance)
    wchars = [np.uint16(s) for s in used]
    wends = list(range(1, used.shape[0] + 1))
    wbounds = [(i, i + 1) for i in range(used.shape[0])]

    total = int(syms.shape[0])
    seq = np.empty(total + max(nlabels - 1, 0), dtype=np.int32)
    n = _interleave(syms, ends, seq, code_of)

    cap = 1 << 16
    while True:
        while True:
            keys, cnts, ok = _count_pairs(seq, n, cap)
            if ok:
                break
            cap <<= 1
        live = np.flatnonzero((keys != -1) & (cnts >= 2))
        if live.shape[0] == 0:
            break
        order = np.argsort(-cnts[live], kind="stable")
        if live.shape[0] > k:
            # keep the k best by count; resolve the boundary tie group by
            # expanded-word order so selection is deterministic
            kth = cnts[live[order[k - 1]]]
            better = [int(live[o]) for o in order if cnts[live[o]] > kth]
            tied = sorted((int(live[o]) for o in order if cnts[live[o]] == kth),
                          key=lambda h: _expansion_key(keys[h], wchars, wbounds))
            chosen = better + tied[:k - len(better)]
            chosen.sort(key=lambda h: (-int(cnts[h]),
                                       _expansion_key(keys[h], wchars, wbounds)))
        else:
            chosen = sorted((int(live[o]) for o in order),
                            key=lambda h: (-int(cnts[h]),
                                           _expansion_key(keys[h], wchars, wbounds)))
        sel_keys = []
        sel_codes = []
        room = budget - wends[-1]
        for h in chosen:
            key = int(keys[h])
            a, b = key >> 32, key & 0xFFFFFFFF
            la = wbounds[a][1] - wbounds[a][0]
            lb = wbounds[b][1] - wbounds[b][0]
            if la + lb > room:
                continue
            room -= la + lb
            code = len(wends)
            sel_keys.append(key)
            sel_codes.append(code)
            start = wends[-1]
            wchars.extend(_word_chars(a, wchars, wbounds))
            wchars.extend(_word_chars(b, wchars, wbounds))
            wends.append(start + la + lb)
            wbounds.append((start, start + la + lb))
        if not sel_keys:
            break
        sk = np.array(sel_keys, dtype=np.int64)
        sc = np.array(sel_codes, dtype=np.int32)
        o = np.argsort(sk)
        n = int(_substitute(seq, n, sk[o], sc[o]))

    # final codes: frequency-ranked, ties by first appearance
    flat = np.array(wchars, dtype=np.uint16)
    seq = seq[:n]
    freqs = np.bincount(seq[seq >= 0], minlength=len(wends))
    order = np.argsort(-freqs, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])
    remap = np.where(seq >= 0, rank[np.maximum(seq, 0)], seq).astype(np.int32)
    # rebuild the flat dictionary in rank order
    starts = np.array([wbounds[i][0] for i in order], dtype=np.int64)
    stops = np.array([wbounds[i][1] for i in order], dtype=np.int64)
    lens = stops - starts
    new_ends = np.cumsum(lens)
    new_chars = np.empty(int(new_ends[-1]) if len(lens) else 0, dtype=np.uint16)
    w = 0
    for s, e in zip(starts, stops):
        new_chars[w:w + (e - s)] = flat[s:e]
        w += e - s
    cdict = CodeDictionary(new_chars, new_ends.astype(np.uint16))
    # split at sentinels
    sent = np.flatnonzero(remap < 0)
    codes = remap[remap >= 0]
    code_ends = np.empty(nlabels, dtype=np.int64)
    code_ends[:sent.shape[0]] = sent - np.arange(sent.shape[0])
    code_ends[nlabels - 1] = codes.shape[0]
    return cdict, codes, code_ends


def _word_chars(i, wchars, wbounds):
    lo, hi = wbounds[i]
    return wchars[lo:hi]


def _expansion_key(key, wchars, wbounds):
    a, b = int(key) >> 32, int(key) & 0xFFFFFFFF
    return tuple(int(c) for c in _word_chars(a, wchars, wbounds)) + \
        tuple(int(c) for c in _word_chars(b, wchars, wbounds))


# ---------------------------------------------------------------------------
# label store

_EMPTY_U16 = np.empty(0, dtype=np.uint16)
_EMPTY_I64 = np.empty(0, dtype=np.int64)


class LabelStore:
    """Vbyte payload of label symbols or dictionary codes, with
    Elias-Fano label endpoints."""

    def __init__(self, payload, endpoints, count, cdict=None):
        self.payload = payload
        self.endpoints = endpoints
        self.count = count
        self.cdict = cdict

    @property
    def compressed(self):
        return self.cdict is not None

    @classmethod
    def build(cls, syms, ends, compress=False, repair_k=REPAIR_K):
        syms = np.ascontiguousarray(syms, dtype=np.uint16)
        ends = np.ascontiguousarray(ends, dtype=np.int64)
        cdict = None
        if compress:
            cdict, vals, vends = repair_build(syms, ends, k=repair_k)
            vals = vals.astype(np.int32)
        else:
            vals, vends = syms.astype(np.int32), ends
        out = np.empty(vals.shape[0] * 3 + 8, dtype=np.uint8)
        nbytes = int(_vbyte_stream(vals, out))
        payload = out[:nbytes].copy()
        byte_ends = _vbyte_ends(vals, vends)
        endpoints = EliasFano(byte_ends, nbytes + 1)
        return cls(payload, endpoints, int(ends.shape[0]), cdict)

    def label_range(self, i):
        if not 0 <= i < self.count:
            raise IndexError("label id out of range")
        if i == 0:
            return 0, self.endpoints.access(0)
        return self.endpoints.pair(i - 1)

    def label_symbols(self, i):
        """Yield the label's symbols in order; supports early exit."""
        lo, hi = self.label_range(i)
        pos = lo
        while pos < hi:
            v, used = vbyte_decode(self.payload, pos)
            pos += used
            if self.cdict is None:
                yield v
            else:
                for c in self.cdict.word(v):
                    yield int(c)

    def kernel_args(self):
        if self.cdict is None:
            dstarts = dends = _EMPTY_I64
            dchars = _EMPTY_U16
        else:
            dstarts, dends = self.cdict.bounds()
            dchars = self.cdict.chars
        return (self.payload, *self.endpoints._kernel_args(),
                self.cdict is not None, dchars, dstarts, dends)

    def size_in_bits(self):
        out = {"payload": self.payload.nbytes * 8}
        for k, v in self.endpoints.size_in_bits().items():
            out["ep_" + k] = v
        if self.cdict is not None:
            out["dict"] = self.cdict.size_in_bits()
        return out
