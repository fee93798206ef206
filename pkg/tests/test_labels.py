import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdtrie.labels import (DICT_BUDGET, SPECIAL_BASE, LabelStore, encode_label,
                           repair_build, special, vbyte_decode, vbyte_encode)


def test_vbyte_examples():
    assert vbyte_encode(0) == b"\x00"
    assert vbyte_encode(127) == b"\x7f"
    assert vbyte_encode(300) == b"\xac\x02"  # 300 = 44 + 2*128


def test_vbyte_roundtrip_and_errors():
    for v in [0, 1, 127, 128, 129, 300, 2**14, 2**21 - 1, 2**40, 2**56 - 1]:
        enc = vbyte_encode(v)
        assert vbyte_decode(enc) == (v, len(enc))
    with pytest.raises(ValueError):
        vbyte_encode(2**56)
    with pytest.raises(ValueError):
        vbyte_decode(b"\x80\x81")


@given(st.integers(0, 2**56 - 1))
def test_vbyte_property(v):
    enc = vbyte_encode(v)
    assert vbyte_decode(enc) == (v, len(enc))
    assert (len(enc) == 1) == (v < 128)


def test_specials():
    assert special(1) == [SPECIAL_BASE + 1]
    assert special(256) == [SPECIAL_BASE + 256]
    # counts above 256 split into specials summing to the degree
    assert special(600) == [SPECIAL_BASE + 256, SPECIAL_BASE + 256, SPECIAL_BASE + 88]
    assert sum(s - SPECIAL_BASE for s in special(600)) == 600
    with pytest.raises(ValueError):
        special(0)


def test_encode_label_shape():
    # the figure-shaped alternation: alpha S(k) c alpha S(k) c ... alpha
    path = [(b"xx", 2, ord("p")), (b"y", 1, ord("q")), (b"", 2, ord("r")),
            (b"zz", 1, ord("s")), (b"w\x00", None, None)]
    lab = encode_label(path)
    assert lab == [120, 120, SPECIAL_BASE + 2, 112,
                   121, SPECIAL_BASE + 1, 113,
                   SPECIAL_BASE + 2, 114,
                   122, 122, SPECIAL_BASE + 1, 115,
                   119, 0]
    assert sum(s - SPECIAL_BASE for s in lab if s > SPECIAL_BASE) == 6
    # degree-0 path: the whole string plus terminator, no specials
    assert encode_label([(b"one\x00", None, None)]) == [111, 110, 101, 0]


def test_repair_hand_example():
    syms = np.array([97, 98, 97, 98, 97, 98], dtype=np.uint16)
    ends = np.array([4, 6], dtype=np.int64)
    cd, codes, code_ends = repair_build(syms, ends)
    words = [bytes(cd.word(i).astype(np.uint8)) for i in range(len(cd))]
    assert words[0] == b"ab"  # the most frequent word gets code 0
    assert list(codes) == [0, 0, 0]
    assert list(code_ends) == [2, 3]


def test_repair_single_symbol_label():
    cd, codes, ce = repair_build(np.array([42], dtype=np.uint16),
                                 np.array([1], dtype=np.int64))
    assert list(codes) == [0]
    assert list(cd.word(0)) == [42]


def test_repair_no_cross_label_pairs():
    # "ab"+"ba" junctions only repeat across a boundary; nothing merges
    syms = np.array([97, 98, 98, 97] * 2, dtype=np.uint16)
    ends = np.array([2, 4, 6, 8], dtype=np.int64)
    cd, codes, ce = repair_build(syms, ends)
    store = LabelStore.build(syms, ends, compress=True)
    for i, (lo, hi) in enumerate(zip([0, 2, 4, 6], ends)):
        assert list(store.label_symbols(i)) == list(syms[lo:hi])


def test_repair_properties():
    rng = np.random.default_rng(5)
    symlist, ends = [], []
    piece = [int(x) for x in rng.integers(1, 300, 12)]
    for i in range(300):
        lab = piece * int(rng.integers(0, 4)) + \
            [int(x) for x in rng.integers(0, 512, rng.integers(0, 6))]
        symlist.extend(lab)
        ends.append(len(symlist))
    syms = np.array(symlist, dtype=np.uint16)
    ends = np.array(ends, dtype=np.int64)
    cd, codes, code_ends = repair_build(syms, ends)
    # decompression totality: every word lies within the buffer,
    # endpoints fit 16 bits
    assert cd.chars.shape[0] <= DICT_BUDGET
    assert cd.ends.dtype == np.uint16
    assert int(cd.ends[-1]) == cd.chars.shape[0]
    # parse correctness: concatenated decoded words reproduce every label
    lo = 0
    pos = 0
    for i in range(len(ends)):
        want = list(syms[lo:ends[i]])
        got = []
        while pos < code_ends[i]:
            got.extend(cd.word(int(codes[pos])))
            pos += 1
        assert got == want, i
        lo = ends[i]
    # frequency monotonicity of the final code assignment
    freqs = np.bincount(codes, minlength=len(cd))
    assert all(int(freqs[i]) >= int(freqs[i + 1]) for i in range(len(freqs) - 1))


def test_store_roundtrip_and_equivalence():
    rng = np.random.default_rng(6)
    symlist, ends = [], []
    for i in range(400):
        L = int(rng.integers(0, 24))
        symlist.extend(int(x) for x in rng.integers(0, 512, L))
        ends.append(len(symlist))
    syms = np.array(symlist, dtype=np.uint16)
    ends = np.array(ends, dtype=np.int64)
    plain = LabelStore.build(syms, ends, compress=False)
    packed = LabelStore.build(syms, ends, compress=True)
    for i in range(400):
        lo = ends[i - 1] if i else 0
        want = [int(x) for x in syms[lo:ends[i]]]
        assert list(plain.label_symbols(i)) == want
        assert list(packed.label_symbols(i)) == want  # identical streams
    with pytest.raises(IndexError):
        plain.label_range(400)


def test_early_exit_is_lazy():
    syms = np.array([1, 2, 3, 4, 5, 6, 7, 8] * 8, dtype=np.uint16)
    ends = np.array([64], dtype=np.int64)
    st_c = LabelStore.build(syms, ends, compress=True)
    gen = st_c.label_symbols(0)
    first3 = list(itertools.islice(gen, 3))
    assert first3 == [1, 2, 3]


def test_compression_on_repetitive_labels():
    rng = np.random.default_rng(7)
    word = [int(x) for x in rng.integers(1, 250, 40)]
    symlist, ends = [], []
    for i in range(500):
        symlist.extend(word)
        ends.append(len(symlist))
    syms = np.array(symlist, dtype=np.uint16)
    ends = np.array(ends, dtype=np.int64)
    plain = LabelStore.build(syms, ends, compress=False)
    packed = LabelStore.build(syms, ends, compress=True)
    assert len(packed.payload) * 10 < len(plain.payload)
    assert list(packed.label_symbols(250)) == word
