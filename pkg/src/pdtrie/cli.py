"""Command-line interface.

Exit codes: 0 ok, 1 input error, 2 container format error.
"""

import sys

import click
import numpy as np

from . import bench as bench_mod
from . import corpus as corpus_mod
from . import stats as stats_mod
from . import storage
from .dictionary import StringDictionary
from .mph import MonotoneHash
from .storage import FormatError


def _fail(code, msg):
    click.echo("error: %s" % msg, err=True)
    sys.exit(code)


def _read_lines(path):
    data = sys.stdin.buffer.read() if path == "-" else open(path, "rb").read()
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    return lines


@click.group()
def main():
    """Succinct path-decomposed tries: string dictionaries and monotone
    minimal perfect hashing."""


@main.command("gen-synthetic")
@click.argument("out", type=click.Path())
@click.option("--i-range", default=500, show_default=True)
@click.option("--j-range", default=500, show_default=True)
@click.option("--t-range", default=10, show_default=True)
@click.option("--suffix-len", default=100, show_default=True)
def gen_synthetic_cmd(out, i_range, j_range, t_range, suffix_len):
    """Write the unbalanced synthetic corpus (defaults: 2.5M strings)."""
    try:
        n = corpus_mod.gen_synthetic(out, i_range, j_range, t_range, suffix_len)
    except corpus_mod.InputError as e:
        _fail(1, e)
    click.echo("wrote %d strings to %s" % (n, out))


def _load_corpus(path, mem_budget):
    try:
        return corpus_mod.load_corpus(path, mem_budget=mem_budget)
    except (corpus_mod.InputError, OSError) as e:
        _fail(1, e)


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.argument("out", type=click.Path())
@click.option("--strategy", type=click.Choice(["lex", "centroid"]),
              default="centroid", show_default=True)
@click.option("--compress", is_flag=True, help="dictionary-compress the labels")
@click.option("--repair-k", default=256, show_default=True,
              help="pairs considered per compression round")
@click.option("--block-size", default=512, show_default=True,
              help="parenthesis block size in bits")
@click.option("--mem-budget", default=1 << 31, show_default=True,
              help="bytes of RAM before the external-sort path kicks in")
def build(corpus, out, strategy, compress, repair_k, block_size, mem_budget):
    """Build a string dictionary container from a corpus."""
    buf, offsets, report = _load_corpus(corpus, mem_budget)
    try:
        sd = StringDictionary.build(_trie(buf, offsets), strategy=strategy,
                                    compress=compress, repair_k=repair_k,
                                    block_size=block_size)
    except ValueError as e:
        _fail(1, e)
    storage.save_dictionary(out, sd)
    click.echo("built %s dictionary: %d strings (%d raw) -> %s"
               % (strategy, report["count"], report["raw_count"], out))


def _trie(buf, offsets):
    from .trie import CompactedTrie
    return CompactedTrie(buf, offsets)


@main.command("mph-build")
@click.argument("corpus", type=click.Path(exists=True))
@click.argument("out", type=click.Path())
@click.option("--block-size", default=512, show_default=True)
@click.option("--mem-budget", default=1 << 31, show_default=True)
def mph_build(corpus, out, block_size, mem_budget):
    """Build a monotone minimal perfect hash container from a corpus."""
    buf, offsets, report = _load_corpus(corpus, mem_budget)
    try:
        mh = MonotoneHash.build(_btrie(buf, offsets), block_size=block_size)
    except ValueError as e:
        _fail(1, e)
    storage.save_mph(out, mh)
    click.echo("built mph: %d strings -> %s" % (report["count"], out))


def _btrie(buf, offsets):
    from .trie import BinaryTrie
    return BinaryTrie(buf, offsets)


def _load_structure(path):
    try:
        return storage.load(path)
    except FormatError as e:
        _fail(2, e)
    except OSError as e:
        _fail(1, e)


@main.command()
@click.argument("index", type=click.Path(exists=True))
@click.argument("queries", default="-")
def lookup(index, queries):
    """Print one id per query line (-1 for misses); '-' reads stdin."""
    sd = _load_structure(index)
    if not isinstance(sd, StringDictionary):
        _fail(1, "container is not a string dictionary")
    try:
        lines = corpus_mod.validate_queries(_read_lines(queries))
    except corpus_mod.InputError as e:
        _fail(1, e)
    qbuf, qoffs = corpus_mod.pack_queries(lines)
    for r in sd.lookup_batch(qbuf, qoffs):
        click.echo(str(int(r)))


@main.command()
@click.argument("index", type=click.Path(exists=True))
@click.argument("ids", default="-")
def access(index, ids):
    """Print the string for each id line."""
    sd = _load_structure(index)
    if not isinstance(sd, StringDictionary):
        _fail(1, "container is not a string dictionary")
    try:
        vals = np.array([int(x) for x in _read_lines(ids)], dtype=np.int64)
    except ValueError as e:
        _fail(1, "ids must be integers: %s" % e)
    if vals.shape[0] and (vals.min() < 0 or vals.max() >= len(sd)):
        _fail(1, "id out of range")
    out = sys.stdout.buffer
    for s in sd.access_batch(vals):
        out.write(s)
        out.write(b"\n")
    out.flush()


@main.command("mph-hash")
@click.argument("index", type=click.Path(exists=True))
@click.argument("queries", default="-")
def mph_hash(index, queries):
    """Print one hash per query line."""
    mh = _load_structure(index)
    if not isinstance(mh, MonotoneHash):
        _fail(1, "container is not a monotone hash")
    try:
        lines = corpus_mod.validate_queries(_read_lines(queries))
    except corpus_mod.InputError as e:
        _fail(1, e)
    qbuf, qoffs = corpus_mod.pack_queries(lines)
    for r in mh.hash_batch(qbuf, qoffs):
        click.echo(str(int(r)))


@main.command()
@click.argument("target", type=click.Path(exists=True))
@click.option("--corpus", type=click.Path(exists=True),
              help="raw corpus for the compression ratio of a container")
@click.option("--mem-budget", default=1 << 31, show_default=True)
def stats(target, corpus, mem_budget):
    """Height statistics of a corpus, or size statistics of a container."""
    import os
    with open(target, "rb") as f:
        is_container = f.read(4) == storage.MAGIC
    if is_container:
        obj = _load_structure(target)
        raw = os.path.getsize(corpus) if corpus else None
        report = stats_mod.structure_stats(obj, raw_bytes=raw)
    else:
        buf, offsets, report0 = _load_corpus(target, mem_budget)
        report = dict(report0)
        report.update(stats_mod.corpus_stats(buf, offsets))
    for k, v in report.items():
        click.echo("%s: %s" % (k, round(v, 4) if isinstance(v, float) else v))


@main.command()
@click.argument("index", type=click.Path(exists=True))
@click.argument("corpus", type=click.Path(exists=True), required=False)
@click.option("--queries", default=bench_mod.DEFAULT_QUERIES, show_default=True)
@click.option("--runs", default=bench_mod.DEFAULT_RUNS, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--mem-budget", default=1 << 31, show_default=True)
def bench(index, corpus, queries, runs, seed, mem_budget):
    """Replay random member queries; reports mean latency and size."""
    import os
    obj = _load_structure(index)
    if corpus:
        buf, offsets, _ = _load_corpus(corpus, mem_budget)
    elif isinstance(obj, StringDictionary):
        ids = np.arange(len(obj), dtype=np.int64)
        strs = obj.access_batch(ids)
        buf, offsets = corpus_mod.pack_queries(strs)
    else:
        _fail(1, "mph bench needs the corpus (it stores no strings)")
    qbuf, qoffs = bench_mod.member_queries(buf, offsets, n=queries, seed=seed)
    report = bench_mod.bench_queries(obj, qbuf, qoffs, runs=runs)
    report["container_bytes"] = os.path.getsize(index)
    for k, v in report.items():
        click.echo("%s: %s" % (k, round(v, 4) if isinstance(v, float) else v))


if __name__ == "__main__":
    main()
