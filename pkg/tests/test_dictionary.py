import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdtrie.corpus import pack_queries
from pdtrie.dictionary import StringDictionary


def test_centroid_spec_example():
    sd = StringDictionary.build([b"bar", b"foo", b"foobar"], strategy="centroid")
    assert sd.lookup(b"foo") == 0
    assert sd.lookup(b"foobar") == 1
    assert sd.lookup(b"bar") == 2
    assert sd.lookup(b"fo") == -1
    assert sd.lookup(b"") == -1
    assert [sd.access(i) for i in range(3)] == [b"foo", b"foobar", b"bar"]
    with pytest.raises(IndexError):
        sd.access(3)


def test_lex_spec_example():
    sd = StringDictionary.build([b"bar", b"foo", b"foobar"], strategy="lex")
    assert [sd.lookup(s) for s in (b"bar", b"foo", b"foobar")] == [0, 1, 2]
    assert [sd.access(i) for i in range(3)] == [b"bar", b"foo", b"foobar"]


def test_empty_set_rejected():
    with pytest.raises(ValueError):
        StringDictionary.build([])
    with pytest.raises(ValueError):
        StringDictionary.build([b"x"], strategy="middle")


def test_empty_string_and_prefix_chains():
    ss = [b"", b"a", b"aa", b"aaa", b"ab", b"b"]
    for strategy in ("lex", "centroid"):
        sd = StringDictionary.build(ss, strategy=strategy)
        ids = [sd.lookup(s) for s in ss]
        assert sorted(ids) == list(range(len(ss)))
        if strategy == "lex":
            assert ids == list(range(len(ss)))
        for s, i in zip(ss, ids):
            assert sd.access(i) == s
        assert sd.lookup(b"aaaa") == -1
        assert sd.lookup(b"ba") == -1
        assert sd.lookup(b"a\x00b") == -1  # terminator bytes cannot match


def make_set(seed, mode, n):
    random.seed(seed)
    ss = set()
    tries = 0
    while len(ss) < n and tries < 20→0 if False else 20_000:
        tries += 1
        if mode == 0:
            ss.add(bytes(random.choice(b"ab") for _ in range(random.randint(1, 12))))
        elif mode == 1:
            ss.add(bytes(random.randrange(1, 256)
                         for _ in range(random.randint(0, 10))))
        else:
            base = bytes(random.choice(b"xyz") for _ in range(random.randint(1, 8)))
            ss.add(base * random.randint(1, 3))
    return sorted(ss)


@pytest.mark.parametrize("mode", [0, 1, 2])
@pytest.mark.parametrize("strategy", ["lex", "centroid"])
@pytest.mark.parametrize("compress", [False, True])
def test_roundtrip_bijection_nonmembers(mode, strategy, compress):
    ss = make_set(100 + mode, mode, 400)
    sd = StringDictionary.build(ss, strategy=strategy, compress=compress)
    accs = sd.access_batch(np.arange(len(ss)))
    seen = set()
    for i, s in enumerate(ss):
        r = sd.lookup(s)
        assert 0 <= r < len(ss)
        seen.add(r)
        assert accs[r] == s
        if strategy == "lex":
            assert r == i
    assert len(seen) == len(ss)
    random.seed(999 + mode)
    for _ in range(300):
        t = bytes(random.randrange(1, 256) for _ in range(random.randint(0, 9)))
        if t not in set(ss):
            assert sd.lookup(t) == -1


def test_batch_equals_single():
    ss = make_set(7, 1, 300)
    sd = StringDictionary.build(ss, strategy="centroid", compress=True)
    qb, qo = pack_queries(ss + [b"zzz-not-there"])
    got = sd.lookup_batch(qb, qo)
    for k, s in enumerate(ss):
        assert got[k] == sd.lookup(s)
    assert got[-1] == sd.lookup(b"zzz-not-there")


def test_centroid_balance_and_visit_bound():
    ss = make_set(11, 0, 900)
    sd = StringDictionary.build(ss, strategy="centroid")
    height = int(sd.node_depths.max())
    assert height <= int(math.log2(len(ss)))
    for s in ss[::17]:
        r, visits, scanned, specials = sd.lookup_stats(s)
        assert visits <= height + 1


def test_scan_cost_bound():
    # per lookup the label scan is linear: normals track the pattern and
    # specials are bounded by one run per matched position plus one per hop
    for mode in (0, 1, 2):
        ss = make_set(31 + mode, mode, 500)
        sd = StringDictionary.build(ss, strategy="centroid")
        for s in ss[::13]:
            r, visits, scanned, specials = sd.lookup_stats(s)
            assert specials <= len(s) + 1 + visits
            assert scanned <= (len(s) + 1) + specials + visits


def test_compressed_uncompressed_equivalence():
    ss = make_set(77, 2, 600)
    qb, qo = pack_queries(ss)
    for strategy in ("lex", "centroid"):
        a = StringDictionary.build(ss, strategy=strategy, compress=False)
        b = StringDictionary.build(ss, strategy=strategy, compress=True)
        assert np.array_equal(a.lookup_batch(qb, qo), b.lookup_batch(qb, qo))
        ids = np.arange(len(ss))
        assert a.access_batch(ids) == b.access_batch(ids)


@given(st.sets(st.binary(min_size=0, max_size=8).filter(lambda b: 0 not in b),
               min_size=1, max_size=40))
def test_roundtrip_property(strs):
    ss = sorted(strs)
    for strategy in ("lex", "centroid"):
        sd = StringDictionary.build(ss, strategy=strategy)
        for i, s in enumerate(ss):
            r = sd.lookup(s)
            if strategy == "lex":
                assert r == i
            assert sd.access(r) == s
