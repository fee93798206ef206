"""Bit-exact serialization container.

Layout: a fixed header (magic, version, structure kind, section count,
payload checksum), a section table (name, dtype, offset, byte length),
then 8-byte-aligned payload sections.  All integers little-endian.
Loading memory-maps the file and exposes sections as read-only numpy
views, so queries touch only the pages they need; the crc32 check over
the payload can be skipped for that reason but is on by default.
"""

import json
import mmap
import struct
import zlib

import numpy as np

from .bitvector import Bits
from .bp import BalancedParens
from .dictionary import StringDictionary
from .eliasfano import EliasFano
from .labels import CodeDictionary, LabelStore
from .mph import MonotoneHash

MAGIC = b"PDT1"
VERSION = 1
_HEADER = struct.Struct("<4sI8sIII")       # magic, version, kind, nsections, payload_off, crc
_ENTRY = struct.Struct("<16s8sQQ")         # name, dtype, offset, nbytes


class FormatError(Exception):
    """Malformed container (CLI exit code 2)."""


def _align8(x):
    return (x + 7) & ~7


def write_container(path, kind, sections, meta):
    """Write named numpy arrays plus a json meta blob."""
    sections = dict(sections)
    sections["__meta__"] = np.frombuffer(
        json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
    names = sorted(sections)
    if any(len(n) > 16 for n in names):
        raise ValueError("section name longer than 16 bytes")
    table_off = _HEADER.size
    payload_off = _align8(table_off + len(names) * _ENTRY.size)
    entries = []
    blobs = []
    off = payload_off
    for n in names:
        arr = np.ascontiguousarray(sections[n])
        blob = arr.tobytes()
        entries.append((n.encode(), arr.dtype.str.encode(), off, len(blob)))
        blobs.append(blob)
        off = _align8(off + len(blob))
    payload = bytearray(off - payload_off)
    for (n, d, o, ln), blob in zip(entries, blobs):
        payload[o - payload_off:o - payload_off + ln] = blob
    crc = zlib.crc32(bytes(payload))
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, kind.encode().ljust(8, b"\0"),
                             len(names), payload_off, crc))
        for n, d, o, ln in entries:
            f.write(_ENTRY.pack(n, d, o, ln))
        f.write(b"\0" * (payload_off - table_off - len(names) * _ENTRY.size))
        f.write(bytes(payload))


def read_container(path, verify=True):
    """Returns (kind, sections, meta); sections are read-only mmap views."""
    f = open(path, "rb")
    try:
        mm = mmap.mmap(f.fileno(), 0, access=mmap.ACCESS_READ)
    except ValueError as e:
        raise FormatError("empty or unmappable container: %s" % e)
    if len(mm) < _HEADER.size:
        raise FormatError("truncated header")
    magic, version, kind, nsections, payload_off, crc = _HEADER.unpack_from(mm, 0)
    if magic != MAGIC:
        raise FormatError("bad magic %r" % magic)
    if version != VERSION:
        raise FormatError("unsupported version %d" % version)
    if verify and zlib.crc32(mm[payload_off:]) != crc:
        raise FormatError("payload checksum mismatch")
    sections = {}
    for k in range(nsections):
        name, dt, off, nbytes = _ENTRY.unpack_from(mm, _HEADER.size + k * _ENTRY.size)
        name = name.rstrip(b"\0").decode()
        if off % 8 or off + nbytes > len(mm):
            raise FormatError("section %s out of bounds" % name)
        dtype = np.dtype(dt.rstrip(b"\0").decode())
        sections[name] = np.frombuffer(mm, dtype=dtype, count=nbytes // dtype.itemsize,
                                       offset=off)
    if "__meta__" not in sections:
        raise FormatError("missing meta section")
    meta = json.loads(sections.pop("__meta__").tobytes().decode())
    return kind.rstrip(b"\0").decode(), sections, meta


# ---------------------------------------------------------------------------
# structure <-> sections

def _bits_sections(prefix, bits):
    out = {prefix + ".words": bits.words}
    if bits.counts is not None:
        out[prefix + ".counts"] = bits.counts
    if bits.sel0 is not None:
        out[prefix + ".sel0"] = bits.sel0
    if bits.sel1 is not None:
        out[prefix + ".sel1"] = bits.sel1
    if bits.dense is not None:
        out[prefix + ".dense"] = bits.dense
    return out


def _bits_from(prefix, sections, n):
    b = Bits.__new__(Bits)
    b.words = sections[prefix + ".words"]
    b.n = n
    b.counts = sections.get(prefix + ".counts")
    b.sel0 = sections.get(prefix + ".sel0")
    b.sel1 = sections.get(prefix + ".sel1")
    b.dense = sections.get(prefix + ".dense")
    return b


def _bp_sections(bp):
    out = _bits_sections("bp", bp.bits)
    out["bp.heap"] = bp.heap
    out["bp.samples"] = bp.samples
    return out


def _bp_from(sections, meta):
    bp = BalancedParens.__new__(BalancedParens)
    bp.bits = _bits_from("bp", sections, meta["bp_len"])
    bp.n = meta["bp_len"]
    bp.block_size = meta["block_size"]
    bp.nblocks = (bp.n + bp.block_size - 1) // bp.block_size
    bp.heap = sections["bp.heap"]
    bp.samples = sections["bp.samples"]
    bp.leaf_base = bp.heap.shape[0] // 2
    return bp


def _ef_sections(prefix, ef):
    out = {prefix + ".low": ef.low}
    out.update(_bits_sections(prefix + ".hi", ef.high))
    return out


def _ef_from(prefix, sections, meta):
    ef = EliasFano.__new__(EliasFano)
    ef.m = meta["m"]
    ef.universe = meta["universe"]
    ef.lbits = meta["lbits"]
    ef.low = sections[prefix + ".low"]
    ef.high = _bits_from(prefix + ".hi", sections, meta["high_len"])
    ef.high_kind = meta["high_kind"]
    return ef


def _ef_meta(ef):
    return {"m": ef.m, "universe": ef.universe, "lbits": ef.lbits,
            "high_kind": ef.high_kind, "high_len": ef.high.n}


def save_dictionary(path, sd):
    sections = _bp_sections(sd.bp)
    sections["branch"] = sd.branch
    sections["lab.pay"] = sd.labels.payload
    sections.update(_ef_sections("lab.ep", sd.labels.endpoints))
    if sd.labels.cdict is not None:
        sections["dict.chars"] = sd.labels.cdict.chars
        sections["dict.ends"] = sd.labels.cdict.ends
    meta = {"count": sd.count, "strategy": sd.strategy,
            "compressed": sd.labels.cdict is not None,
            "block_size": sd.bp.block_size, "bp_len": sd.bp.n,
            "ep": _ef_meta(sd.labels.endpoints)}
    write_container(path, "strdict", sections, meta)


def _dictionary_from(sections, meta):
    bp = _bp_from(sections, meta)
    cdict = None
    if meta["compressed"]:
        cdict = CodeDictionary(sections["dict.chars"], sections["dict.ends"])
    labels = LabelStore(sections["lab.pay"], _ef_from("lab.ep", sections, meta["ep"]),
                        meta["count"], cdict)
    return StringDictionary(bp, sections["branch"], labels, meta["count"],
                            meta["strategy"])


def save_mph(path, mh):
    sections = _bp_sections(mh.bp)
    sections.update(_bits_sections("delim", mh.skip_delims))
    sections["payload"] = mh.skip_payload
    meta = {"count": mh.count, "rawbits": mh.rawbits,
            "block_size": mh.bp.block_size, "bp_len": mh.bp.n,
            "delim_len": mh.skip_delims.n}
    write_container(path, "mph", sections, meta)


def _mph_from(sections, meta):
    bp = _bp_from(sections, meta)
    delims = _bits_from("delim", sections, meta["delim_len"])
    return MonotoneHash(bp, delims, sections["payload"], meta["count"],
                        rawbits=meta["rawbits"])


def load(path, verify=True):
    """Load any container; returns a StringDictionary or MonotoneHash."""
    kind, sections, meta = read_container(path, verify=verify)
    if kind == "strdict":
        return _dictionary_from(sections, meta)
    if kind == "mph":
        return _mph_from(sections, meta)
    raise FormatError("unknown structure kind %r" % kind)
