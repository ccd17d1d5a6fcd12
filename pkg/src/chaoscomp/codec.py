"""Lossless codecs behind a small id-based interface.

``CodecId.STORE`` passes bytes through, ``CodecId.BASELINE`` is the in-repo
LZSS + canonical Huffman coder, and ``CodecId.ZSTD`` wraps the optional
``zstandard`` package.

Baseline payload layout (all integers little-endian)::

    offset  size  field
    0       1     frame type: 0 = stored, 1 = huffman
    1       4     original length
    5       4     CRC-32 of the original bytes
    9       n     stored: the original bytes
    9       158   huffman: 286 literal/length then 30 distance code lengths,
                  4 bits each, high nibble first
    167     ...   huffman: code bitstream, MSB first, ends with symbol 256

The encoder picks whichever frame is smaller, so the payload never exceeds
the input by more than 9 bytes.  The checksum sits ahead of the body so that
any change to the input alters the earliest bytes of the frame.
"""
from __future__ import annotations

import csv
import heapq
import struct
import time
import zlib
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _lz
from .errors import CodecUnavailable, DecodeError, EmptyInput

try:
    import zstandard
except ImportError:  # optional dependency
    zstandard = None


class CodecId(IntEnum):
    STORE = 0
    BASELINE = 1
    ZSTD = 2


@dataclass(frozen=True)
class CompressedChunk:
    payload: bytes
    original_length: int


FRAME_STORED = 0
FRAME_HUFFMAN = 1
_HEADER = struct.Struct("<BII")
_TABLE_BYTES = (_lz.N_LITLEN + _lz.N_DIST) // 2


def codec_available(c: CodecId) -> bool:
    return c != CodecId.ZSTD or zstandard is not None


# ---------------------------------------------------------------------------
# Huffman code construction

def limited_code_lengths(freqs, max_bits: int = _lz.MAX_BITS) -> list[int]:
    """Optimal code lengths no longer than ``max_bits`` (package-merge).

    Symbols with zero frequency get length 0; a lone used symbol gets
    length 1 so the decoder always reads at least one bit.
    """
    used = [(f, s) for s, f in enumerate(freqs) if f > 0]
    lengths = [0] * len(freqs)
    if not used:
        return lengths
    if len(used) == 1:
        lengths[used[0][1]] = 1
        return lengths
    if len(used) > 1 << max_bits:
        raise ValueError("alphabet too large for the length limit")
    used.sort()
    leaves = [(f, (s,)) for f, s in used]
    packages = list(leaves)
    for _ in range(max_bits - 1):
        paired = [(packages[i][0] + packages[i + 1][0], packages[i][1] + packages[i + 1][1])
                  for i in range(0, len(packages) - 1, 2)]
        packages = list(heapq.merge(leaves, paired, key=lambda p: p[0]))
    for _, symbols in packages[:2 * len(used) - 2]:
        for s in symbols:
            lengths[s] += 1
    return lengths


def canonical_codes(lengths) -> list[int]:
    """Assign canonical codewords (shorter first, then by symbol)."""
    bl_count = [0] * (_lz.MAX_BITS + 1)
    for n in lengths:
        if n:
            bl_count[n] += 1
    code = 0
    next_code = [0] * (_lz.MAX_BITS + 2)
    for bits in range(1, _lz.MAX_BITS + 1):
        code = (code + bl_count[bits - 1]) << 1
        next_code[bits] = code
    codes = [0] * len(lengths)
    for s, n in enumerate(lengths):
        if n:
            codes[s] = next_code[n]
            next_code[n] += 1
    return codes


def _decode_tables(lengths: np.ndarray, offset: int):
    """Counts/symbol arrays for canonical decoding; rejects oversubscription."""
    counts = np.bincount(lengths, minlength=_lz.MAX_BITS + 1).astype(np.int64)
    counts[0] = 0
    left = 1
    for bits in range(1, _lz.MAX_BITS + 1):
        left = (left << 1) - counts[bits]
        if left < 0:
            raise DecodeError("over-subscribed Huffman code", offset)
    symbols = np.argsort(np.where(lengths > 0, lengths, 99), kind="stable")
    return counts, symbols[:int(counts.sum())].astype(np.int64)


# ---------------------------------------------------------------------------
# baseline frames

def _baseline_compress(data: bytes) -> bytes:
    src = np.frombuffer(data, dtype=np.uint8)
    n = src.size
    header = _HEADER.pack(FRAME_HUFFMAN, n, zlib.crc32(data))
    tok_len = np.empty(n, dtype=np.int64)
    tok_val = np.empty(n, dtype=np.int64)
    nt = _lz.lz_parse(src, tok_len, tok_val)
    lit_f, dist_f = _lz.symbol_counts(tok_len, tok_val, nt, _lz.LEN_CODE, _lz.DIST_CODE)
    lit_len = limited_code_lengths(lit_f)
    dist_len = limited_code_lengths(dist_f)
    bits = (sum(int(f) * l for f, l in zip(lit_f, lit_len))
            + sum(int(f) * l for f, l in zip(dist_f, dist_len))
            + sum(int(lit_f[257 + c]) * int(e) for c, e in enumerate(_lz.LEN_EXTRA))
            + sum(int(dist_f[d]) * int(e) for d, e in enumerate(_lz.DIST_EXTRA)))
    if _TABLE_BYTES + (bits + 7) // 8 >= n:
        return bytes([FRAME_STORED]) + header[1:] + data

    out = np.zeros((bits + 7) // 8, dtype=np.uint8)
    written = _lz.pack(tok_len, tok_val, nt,
                       np.array(canonical_codes(lit_len), dtype=np.int64),
                       np.array(lit_len, dtype=np.int64),
                       np.array(canonical_codes(dist_len), dtype=np.int64),
                       np.array(dist_len, dtype=np.int64),
                       _lz.LEN_CODE, _lz.DIST_CODE, out)
    assert written == bits
    nibbles = np.array(lit_len + dist_len, dtype=np.uint8)
    table = (nibbles[0::2] << 4) | nibbles[1::2]
    return header + table.tobytes() + out.tobytes()


_UNPACK_ERRORS = {
    _lz.ERR_EOF: "bitstream ends before end-of-block",
    _lz.ERR_SYMBOL: "invalid Huffman symbol",
    _lz.ERR_DISTANCE: "match distance reaches before start of output",
    _lz.ERR_OVERFLOW: "decoded data exceeds recorded length",
    _lz.ERR_SHORT: "end-of-block before recorded length",
}


def _baseline_decompress(payload: bytes, expected: int) -> bytes:
    if len(payload) < _HEADER.size:
        raise DecodeError("truncated frame header", len(payload))
    kind, n, crc = _HEADER.unpack_from(payload)
    if n != expected:
        raise DecodeError("frame length field does not match the expected length", 1)
    if kind == FRAME_STORED:
        body = payload[_HEADER.size:]
        if len(body) != n:
            raise DecodeError("stored frame length mismatch", len(payload))
        data = bytes(body)
    elif kind == FRAME_HUFFMAN:
        start = _HEADER.size + _TABLE_BYTES
        if len(payload) < start:
            raise DecodeError("truncated code length table", len(payload))
        table = np.frombuffer(payload, dtype=np.uint8, count=_TABLE_BYTES, offset=_HEADER.size)
        lengths = np.empty(2 * _TABLE_BYTES, dtype=np.int64)
        lengths[0::2] = table >> 4
        lengths[1::2] = table & 0x0F
        lc, ls = _decode_tables(lengths[:_lz.N_LITLEN], _HEADER.size)
        dc, ds = _decode_tables(lengths[_lz.N_LITLEN:], _HEADER.size)
        out = np.empty(n, dtype=np.uint8)
        src = np.frombuffer(payload, dtype=np.uint8)
        status, bit = _lz.unpack(src, start, lc, ls, dc, ds, out)
        if status != _lz.OK:
            raise DecodeError(_UNPACK_ERRORS[status], start + bit // 8)
        used = start + (bit + 7) // 8
        if used != len(payload):
            raise DecodeError("trailing bytes after end-of-block", used)
        data = out.tobytes()
    else:
        raise DecodeError(f"unknown frame type {kind}", 0)
    if zlib.crc32(data) != crc:
        raise DecodeError("checksum mismatch", 5)
    return data


# ---------------------------------------------------------------------------
# public interface

def compress(data, c: CodecId = CodecId.BASELINE) -> CompressedChunk:
    data = bytes(data)
    if not data:
        raise EmptyInput("nothing to compress")
    c = CodecId(c)
    if c == CodecId.STORE:
        payload = data
    elif c == CodecId.BASELINE:
        payload = _baseline_compress(data)
    else:
        if zstandard is None:
            raise CodecUnavailable("zstd codec requires the 'zstandard' package")
        payload = zstandard.ZstdCompressor(level=3).compress(data)
    return CompressedChunk(payload, len(data))


def decompress(chunk: CompressedChunk, c: CodecId = CodecId.BASELINE) -> bytes:
    try:
        c = CodecId(c)
    except ValueError:
        raise DecodeError(f"unknown codec id {c}") from None
    payload = bytes(chunk.payload)
    if c == CodecId.STORE:
        data = payload
    elif c == CodecId.BASELINE:
        data = _baseline_decompress(payload, chunk.original_length)
    else:
        if zstandard is None:
            raise CodecUnavailable("zstd codec requires the 'zstandard' package")
        try:
            data = zstandard.ZstdDecompressor().decompress(
                payload, max_output_size=chunk.original_length)
        except zstandard.ZstdError as exc:
            raise DecodeError(f"zstd: {exc}") from None
    if len(data) != chunk.original_length:
        raise DecodeError(f"decoded {len(data)} bytes, expected {chunk.original_length}")
    return data


def compression_benchmark(corpus, codecs=(CodecId.STORE, CodecId.BASELINE),
                          out=None) -> list[tuple[str, float, float]]:
    """Ratio (original / compressed) and compress time per available codec.

    Rows are also written as CSV (codec,ratio,seconds) to ``out`` if given.
    """
    corpus = bytes(corpus)
    if not corpus:
        raise EmptyInput("benchmark corpus is empty")
    rows = []
    for c in codecs:
        c = CodecId(c)
        if not codec_available(c):
            continue
        t0 = time.perf_counter()
        chunk = compress(corpus, c)
        rows.append((c.name.lower(), len(corpus) / len(chunk.payload), time.perf_counter() - t0))
    if out is not None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["codec", "ratio", "seconds"])
        w.writerows((name, f"{ratio:.6f}", f"{t:.6f}") for name, ratio, t in rows)
    return rows
