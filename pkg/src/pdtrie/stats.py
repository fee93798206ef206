"""Height and space statistics.

Heights follow the usual conventions: for tries the average height of
the leaves (number of internal ancestors), for path-decomposed trees
the average depth over all nodes.  The compacted-trie height is
reported both with and without edges that exist only because of the
logical terminator (a string that is a prefix of its sorted successor
ends one edge higher in the terminator-free view).
"""

import numpy as np

from .trie import BinaryTrie, CompactedTrie, decompose, decompose_left_biased


def corpus_stats(buf, offsets):
    """Height statistics of all structure flavours for one corpus."""
    n = len(offsets) - 1
    out = {"count": n}
    lens = np.diff(offsets)

    trie = CompactedTrie(buf, offsets)
    leaf_d = trie.leaf_node_depths()
    out["trie_avg_height"] = float(leaf_d.mean())
    is_prefix = np.zeros(n, dtype=np.int64)
    if n > 1:
        is_prefix[:-1] = (trie.lcps == lens[:-1]).astype(np.int64)
    out["trie_avg_height_no_term"] = float((leaf_d - is_prefix).mean())

    lex = decompose(trie, "leftmost")
    out["lex_avg_height"] = float(lex.depths.mean())
    out["lex_max_height"] = int(lex.depths.max())
    del lex
    cen = decompose(trie, "heavy")
    out["centroid_avg_height"] = float(cen.depths.mean())
    out["centroid_max_height"] = int(cen.depths.max())
    del cen, trie

    btrie = BinaryTrie(buf, offsets)
    out["hollow_avg_height"] = float(btrie.leaf_node_depths().mean())
    ch = decompose_left_biased(btrie)
    out["centroid_hollow_avg_height"] = float(ch.depths.mean())
    out["centroid_hollow_max_height"] = int(ch.depths.max())
    return out


def structure_stats(obj, raw_bytes=None):
    """Size breakdown, bits per string, and ratio to the raw corpus."""
    sizes = obj.size_in_bits()
    total_bits = sum(sizes.values())
    out = {
        "kind": type(obj).__name__,
        "count": len(obj),
        "total_bytes": total_bits // 8,
        "bits_per_string": total_bits / max(len(obj), 1),
    }
    if raw_bytes:
        out["compression_ratio"] = (total_bits / 8) / raw_bytes
    out.update({"bits_" + k: v for k, v in sorted(sizes.items())})
    return out
