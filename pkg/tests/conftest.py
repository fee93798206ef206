import numpy as np
import pytest
from hypothesis import settings

from pdtrie.corpus import pack_queries, random_strings, synthetic_strings, urlish_strings
from pdtrie.dictionary import StringDictionary
from pdtrie.mph import MonotoneHash

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def stack_mates(bits):
    """O(n) stack-scan mate oracle; bits is a 0/1 array."""
    mate = np.full(len(bits), -1, dtype=np.int64)
    st = []
    for p, b in enumerate(bits):
        if b:
            st.append(p)
        else:
            q = st.pop()
            mate[q] = p
            mate[p] = q
    return mate


def random_balanced(n, rng):
    """Uniform-ish random balanced sequence: shuffle n/2 opens and closes,
    rotate at the minimum prefix so every prefix excess is non-negative."""
    arr = np.zeros(n, dtype=np.uint8)
    arr[:n // 2] = 1
    rng.shuffle(arr)
    c = np.cumsum(2 * arr.astype(np.int32) - 1)
    k = int(np.argmin(c)) + 1
    return np.concatenate([arr[k:], arr[:k]]) if k < n else arr


def random_tree_dfuds(n_nodes, rng, super_root=True):
    """DFUDS bits of a random tree (uniform random parents)."""
    parents = np.zeros(n_nodes, dtype=np.int64)
    for i in range(1, n_nodes):
        parents[i] = int(rng.integers(0, i))
    kids = [[] for _ in range(n_nodes)]
    for i in range(1, n_nodes):
        kids[parents[i]].append(i)
    bits = [1] if super_root else []
    stack = [0]
    while stack:
        v = stack.pop()
        bits.extend([1] * len(kids[v]))
        bits.append(0)
        stack.extend(reversed(kids[v]))
    return np.array(bits, dtype=np.uint8)


@pytest.fixture(scope="session")
def corpora():
    """The acceptance corpora: random, url-like, scaled synthetic."""
    return {
        "random": random_strings(100_000, seed=12),
        "urls": urlish_strings(100_000, seed=13),
        "synth": sorted(set(synthetic_strings(50, 50, 10, 100))),
    }


@pytest.fixture(scope="session")
def dict_variants(corpora):
    """All four dictionary variants per corpus, built once."""
    out = {}
    for name, ss in corpora.items():
        for strategy in ("lex", "centroid"):
            for compress in (False, True):
                out[(name, strategy, compress)] = StringDictionary.build(
                    ss, strategy=strategy, compress=compress)
    return out


@pytest.fixture(scope="session")
def mph_variants(corpora):
    return {name: MonotoneHash.build(ss) for name, ss in corpora.items()}


@pytest.fixture(scope="session")
def packed_corpora(corpora):
    return {name: pack_queries(ss) for name, ss in corpora.items()}
