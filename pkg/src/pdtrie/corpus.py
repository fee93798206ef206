"""Corpus ingestion and dataset generation.

Corpora are newline-delimited byte strings containing neither 0x00 nor
0x0A.  Ingestion sorts and deduplicates; inputs larger than the memory
budget go through a chunked external sort so nothing requires the whole
set in RAM at once.
"""

import heapq
import os
import tempfile

import numpy as np

# 100 distinct suffix bytes for the synthetic set; avoids b, c, d, the
# terminator and the newline
SYNTH_SUFFIX = bytes(range(0x65, 0x65 + 100))


class InputError(ValueError):
    """Malformed corpus or query input (CLI exit code 1)."""


def synthetic_strings(i_range=500, j_range=500, t_range=10, suffix_len=100):
    """Yield d^i c^j b^t suffix in generation order (i, j, t ascending)."""
    if min(i_range, j_range, t_range, suffix_len) <= 0:
        raise InputError("synthetic parameters must be positive")
    if suffix_len > len(SYNTH_SUFFIX):
        raise InputError("suffix length capped at %d" % len(SYNTH_SUFFIX))
    suffix = SYNTH_SUFFIX[:suffix_len]
    for i in range(i_range):
        di = b"d" * i
        for j in range(j_range):
            dc = di + b"c" * j
            for t in range(t_range):
                yield dc + b"b" * t + suffix


def gen_synthetic(path, i_range=500, j_range=500, t_range=10, suffix_len=100):
    """Write the synthetic corpus; returns the string count."""
    count = 0
    with open(path, "wb", buffering=1 << 22) as f:
        for s in synthetic_strings(i_range, j_range, t_range, suffix_len):
            f.write(s)
            f.write(b"\n")
            count += 1
    return count


def save_corpus(path, strings):
    with open(path, "wb") as f:
        for s in strings:
            f.write(s)
            f.write(b"\n")


def _split_lines(data):
    arr = np.frombuffer(data, dtype=np.uint8)
    if arr.shape[0] and int(arr.min()) == 0:
        raise InputError("corpus contains a 0x00 byte")
    if arr.shape[0] and data[-1:] != b"\n":
        raise InputError("corpus must end with a newline")
    nl = np.flatnonzero(arr == 0x0A)
    starts = np.concatenate([[0], nl[:-1] + 1]) if nl.shape[0] else np.zeros(0, np.int64)
    return [data[s:e] for s, e in zip(starts, nl)]


def load_corpus(path, mem_budget=1 << 31, tmpdir=None):
    """Read, sort and deduplicate a corpus.

    Returns (buf, offsets, report); the report records the counts and
    whether the file was already sorted.
    """
    size = os.path.getsize(path)
    if size > mem_budget:
        path = external_sort(path, mem_budget=mem_budget, tmpdir=tmpdir)
    with open(path, "rb") as f:
        lines = _split_lines(f.read())
    raw = len(lines)
    was_sorted = all(lines[i - 1] <= lines[i] for i in range(1, len(lines)))
    lines.sort()
    out = [lines[i] for i in range(len(lines)) if i == 0 or lines[i] != lines[i - 1]]
    buf = np.frombuffer(b"".join(out), dtype=np.uint8)
    offsets = np.zeros(len(out) + 1, dtype=np.int64)
    np.cumsum([len(s) for s in out], out=offsets[1:])
    report = {"raw_count": raw, "count": len(out), "input_sorted": was_sorted,
              "bytes": int(offsets[-1])}
    return buf, offsets, report


def external_sort(path, mem_budget, tmpdir=None):
    """Chunked sort-merge for corpora that do not fit the budget; returns
    the path of a sorted, deduplicated temporary corpus."""
    chunk_paths = []
    chunk = []
    used = 0
    with open(path, "rb") as f:
        for line in f:
            s = line[:-1]
            chunk.append(s)
            used += len(s) + 40
            if used >= max(mem_budget // 4, 1 << 20):
                chunk.sort()
                fd, p = tempfile.mkstemp(dir=tmpdir, suffix=".chunk")
                with os.fdopen(fd, "wb") as out:
                    for t in chunk:
                        out.write(t + b"\n")
                chunk_paths.append(p)
                chunk = []
                used = 0
    chunk.sort()
    fd, merged_path = tempfile.mkstemp(dir=tmpdir, suffix=".sorted")

    def stream(p):
        with open(p, "rb") as f:
            for line in f:
                yield line[:-1]

    streams = [stream(p) for p in chunk_paths] + [iter(chunk)]
    with os.fdopen(fd, "wb") as out:
        prev = None
        for s in heapq.merge(*streams):
            if s != prev:
                out.write(s + b"\n")
                prev = s
    for p in chunk_paths:
        os.unlink(p)
    return merged_path


def validate_queries(lines):
    for s in lines:
        if b"\x00" in s:
            raise InputError("query contains a 0x00 byte")
    return lines


def pack_queries(queries):
    """(buf, offsets) for the batch kernels."""
    offsets = np.zeros(len(queries) + 1, dtype=np.int64)
    np.cumsum([len(q) for q in queries], out=offsets[1:])
    buf = np.frombuffer(b"".join(queries), dtype=np.uint8)
    return buf, offsets


def random_strings(n, seed=0, min_len=1, max_len=16):
    """Sorted unique random byte strings over the full non-reserved range."""
    rng = np.random.default_rng(seed)
    out = set()
    while len(out) < n:
        need = n - len(out)
        lens = rng.integers(min_len, max_len + 1, need)
        flat = rng.integers(1, 256, int(lens.sum()), dtype=np.uint8)
        flat[flat == 0x0A] = 0x0B
        pos = 0
        for L in lens:
            out.add(flat[pos:pos + L].tobytes())
            pos += L
    return sorted(out)


def urlish_strings(n, seed=0):
    """Sorted unique URL-shaped strings with heavy shared prefixes."""
    rng = np.random.default_rng(seed)
    hosts = [b"http://www.%s.%s" % (w, tld)
             for w in (b"alpha", b"beta", b"gamma", b"delta", b"omega",
                       b"server", b"archive", b"data")
             for tld in (b"com", b"org", b"net")]
    segs = [b"index", b"page", b"item", b"doc", b"x", b"y", b"2001", b"2002",
            b"a", b"b", b"c", b"images", b"static", b"news"]
    out = set()
    while len(out) < n:
        h = hosts[int(rng.integers(0, len(hosts)))]
        depth = int(rng.integers(1, 6))
        parts = [segs[int(rng.integers(0, len(segs)))] for _ in range(depth)]
        tail = b"%d" % int(rng.integers(0, 10000))
        out.add(h + b"/" + b"/".join(parts) + b"/" + tail)
    return sorted(out)
