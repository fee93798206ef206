"""Succinct path-decomposed tries.

Two query structures built on a small layer of succinct primitives:

- ``StringDictionary``: compressed bidirectional string <-> id mapping
  (lex or centroid path decomposition, optionally with dictionary-
  compressed labels).
- ``MonotoneHash``: lexicographic-order-preserving minimal perfect hash
  built on a centroid path-decomposed hollow trie.
"""

from .bitvector import Bits
from .eliasfano import EliasFano
from .bp import BalancedParens
from .dictionary import StringDictionary
from .mph import MonotoneHash

__all__ = [
    "Bits",
    "EliasFano",
    "BalancedParens",
    "StringDictionary",
    "MonotoneHash",
]
