"""Chunked encrypt/decrypt pipeline and the ``SOC1`` container.

Container layout, little-endian::

    "SOC1" | version u8 | codec u8 | mode u8 | chunk size u32
    | original length u64 | chunk count u32 | count x u32 body lengths | body

Stage order per chunk:

    SCE  shuffle -> compress -> substitute
    CTE  compress -> shuffle -> substitute
    ETC  shuffle -> substitute -> compress

Each map runs as one continuous keystream across all chunks, and the
substitution chain value carries over chunk boundaries, so chunks must be
processed in order.  The header is neither encrypted nor authenticated: it
reveals the original length and every compressed chunk length.
"""
from __future__ import annotations

import csv
import shutil
import struct
import tempfile
import time
from dataclasses import dataclass, field
from enum import IntEnum
from typing import BinaryIO

from .codec import CodecId, CompressedChunk, compress, decompress
from .errors import DecodeError, EmptyInput, FormatError, IntegrityMismatch
from .keys import ChaosKey, require_valid
from .permute import deshuffle, shuffle
from .subst import SubstState, desubstitute, substitute

MAGIC = b"SOC1"
VERSION = 1
MIN_CHUNK = 4 << 10
MAX_CHUNK = 64 << 20
DEFAULT_CHUNK = 1 << 20

_HEAD = struct.Struct("<4sBBBIQI")


class PipelineMode(IntEnum):
    SCE = 0
    CTE = 1
    ETC = 2


def _check_chunk_size(chunk_size: int) -> None:
    if not MIN_CHUNK <= chunk_size <= MAX_CHUNK:
        raise ValueError(f"chunk size must be in [{MIN_CHUNK}, {MAX_CHUNK}]")


def _chunk_count(original_length: int, chunk_size: int) -> int:
    return -(-original_length // chunk_size)


@dataclass(frozen=True)
class SceContainer:
    codec: CodecId
    mode: PipelineMode
    chunk_size: int
    original_length: int
    chunk_lengths: tuple[int, ...]
    body: bytes = field(repr=False)
    version: int = VERSION

    def header_bytes(self) -> bytes:
        return (_HEAD.pack(MAGIC, self.version, self.codec, self.mode, self.chunk_size,
                           self.original_length, len(self.chunk_lengths))
                + struct.pack(f"<{len(self.chunk_lengths)}I", *self.chunk_lengths))

    def to_bytes(self) -> bytes:
        return self.header_bytes() + self.body

    @classmethod
    def from_bytes(cls, buf) -> "SceContainer":
        buf = bytes(buf)
        header = parse_header(buf)
        body = buf[header.body_offset:]
        if len(body) != sum(header.chunk_lengths):
            raise FormatError(f"body holds {len(body)} bytes, header promises "
                              f"{sum(header.chunk_lengths)}")
        return cls(header.codec, header.mode, header.chunk_size, header.original_length,
                   header.chunk_lengths, body, header.version)


@dataclass(frozen=True)
class ContainerHeader:
    version: int
    codec: CodecId
    mode: PipelineMode
    chunk_size: int
    original_length: int
    chunk_lengths: tuple[int, ...]

    @property
    def body_offset(self) -> int:
        return _HEAD.size + 4 * len(self.chunk_lengths)

    def plain_lengths(self) -> list[int]:
        n = len(self.chunk_lengths)
        last = self.original_length - self.chunk_size * (n - 1)
        return [self.chunk_size] * (n - 1) + [last]


def _parse_fixed(head: bytes) -> tuple:
    if len(head) < _HEAD.size:
        raise FormatError("truncated container header")
    magic, version, codec, mode, chunk_size, original, count = _HEAD.unpack_from(head)
    if magic != MAGIC:
        raise FormatError("not a SOC1 container")
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    try:
        codec = CodecId(codec)
        mode = PipelineMode(mode)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if not MIN_CHUNK <= chunk_size <= MAX_CHUNK:
        raise FormatError(f"chunk size {chunk_size} out of range")
    if original == 0 or count != _chunk_count(original, chunk_size):
        raise FormatError("chunk count does not match original length")
    return version, codec, mode, chunk_size, original, count


def parse_header(buf: bytes) -> ContainerHeader:
    version, codec, mode, chunk_size, original, count = _parse_fixed(buf)
    end = _HEAD.size + 4 * count
    if len(buf) < end:
        raise FormatError("truncated chunk length table")
    lengths = struct.unpack_from(f"<{count}I", buf, _HEAD.size)
    return ContainerHeader(version, codec, mode, chunk_size, original, lengths)


def read_header(src: BinaryIO) -> ContainerHeader:
    head = src.read(_HEAD.size)
    version, codec, mode, chunk_size, original, count = _parse_fixed(head)
    table = src.read(4 * count)
    if len(table) != 4 * count:
        raise FormatError("truncated chunk length table")
    return ContainerHeader(version, codec, mode, chunk_size, original,
                           struct.unpack(f"<{count}I", table))


class _Keystreams:
    """The three running generators plus the chain value for one stream."""

    def __init__(self, key: ChaosKey):
        require_valid(key)
        self.threshold = key.threshold
        self.logistic = key.logistic()
        self.subst = SubstState(key.henon(), key.lorenz())

    @property
    def steps(self) -> dict[str, int]:
        return {"logistic": self.logistic.steps, "henon": self.subst.henon.steps,
                "lorenz": self.subst.lorenz.steps}


class Encryptor(_Keystreams):
    def __init__(self, key: ChaosKey, codec=CodecId.BASELINE, mode=PipelineMode.SCE):
        super().__init__(key)
        self.codec = CodecId(codec)
        self.mode = PipelineMode(mode)

    def chunk(self, data: bytes) -> bytes:
        T = self.threshold
        if self.mode == PipelineMode.SCE:
            packed = compress(shuffle(data, self.logistic, T), self.codec).payload
            return substitute(packed, self.subst)
        if self.mode == PipelineMode.CTE:
            packed = compress(data, self.codec).payload
            return substitute(shuffle(packed, self.logistic, T), self.subst)
        mixed = substitute(shuffle(data, self.logistic, T), self.subst)
        return compress(mixed, self.codec).payload


class Decryptor(_Keystreams):
    def __init__(self, key: ChaosKey, codec=CodecId.BASELINE, mode=PipelineMode.SCE):
        super().__init__(key)
        self.codec = CodecId(codec)
        self.mode = PipelineMode(mode)

    def chunk(self, body: bytes, plain_length: int) -> bytes:
        T = self.threshold
        if self.mode == PipelineMode.SCE:
            packed = desubstitute(body, self.subst)
            shuffled = decompress(CompressedChunk(packed, plain_length), self.codec)
            return deshuffle(shuffled, self.logistic, T)
        if self.mode == PipelineMode.CTE:
            packed = deshuffle(desubstitute(body, self.subst), self.logistic, T)
            return decompress(CompressedChunk(packed, plain_length), self.codec)
        mixed = decompress(CompressedChunk(body, plain_length), self.codec)
        return deshuffle(desubstitute(mixed, self.subst), self.logistic, T)


def encrypt(plaintext, key: ChaosKey, codec=CodecId.BASELINE, mode=PipelineMode.SCE,
            chunk_size: int = DEFAULT_CHUNK) -> SceContainer:
    plaintext = memoryview(bytes(plaintext))
    if not plaintext:
        raise EmptyInput("refusing to encrypt empty input")
    _check_chunk_size(chunk_size)
    enc = Encryptor(key, codec, mode)
    parts = [enc.chunk(bytes(plaintext[i:i + chunk_size]))
             for i in range(0, len(plaintext), chunk_size)]
    return SceContainer(enc.codec, enc.mode, chunk_size, len(plaintext),
                        tuple(len(p) for p in parts), b"".join(parts))


def decrypt(c: SceContainer, key: ChaosKey) -> bytes:
    header = ContainerHeader(c.version, c.codec, c.mode, c.chunk_size,
                             c.original_length, c.chunk_lengths)
    if len(c.body) != sum(c.chunk_lengths):
        raise FormatError("body length does not match the chunk table")
    dec = Decryptor(key, c.codec, c.mode)
    out, pos = [], 0
    for size, plain_len in zip(c.chunk_lengths, header.plain_lengths()):
        out.append(_decrypt_chunk(dec, c.body[pos:pos + size], plain_len, pos))
        pos += size
    data = b"".join(out)
    if len(data) != c.original_length:
        raise IntegrityMismatch(f"recovered {len(data)} bytes, expected {c.original_length}")
    return data


def _decrypt_chunk(dec: Decryptor, body: bytes, plain_len: int, base: int) -> bytes:
    try:
        data = dec.chunk(body, plain_len)
    except DecodeError as exc:
        # report offsets relative to the whole container body
        offset = base + exc.offset if exc.offset >= 0 else -1
        raise DecodeError(exc.detail, offset) from None
    if len(data) != plain_len:
        raise IntegrityMismatch(f"chunk decoded to {len(data)} bytes, expected {plain_len}")
    return data


def encrypt_stream(src: BinaryIO, dst: BinaryIO, key: ChaosKey, codec=CodecId.BASELINE,
                   mode=PipelineMode.SCE, chunk_size: int = DEFAULT_CHUNK,
                   spool_limit: int | None = None) -> ContainerHeader:
    """Encrypt ``src`` chunk by chunk into ``dst``.

    The length table precedes the body, so encrypted chunks are spooled
    (in memory up to ``spool_limit`` bytes, default one chunk, then on disk)
    until the input is exhausted.  Peak memory stays a small multiple of
    the chunk size.
    """
    _check_chunk_size(chunk_size)
    spool_limit = chunk_size if spool_limit is None else spool_limit
    enc = Encryptor(key, codec, mode)
    lengths, total = [], 0
    with tempfile.SpooledTemporaryFile(max_size=spool_limit) as spool:
        while True:
            block = _read_full(src, chunk_size)
            if not block:
                break
            part = enc.chunk(block)
            spool.write(part)
            lengths.append(len(part))
            total += len(block)
        if total == 0:
            raise EmptyInput("refusing to encrypt empty input")
        header = ContainerHeader(VERSION, enc.codec, enc.mode, chunk_size, total, tuple(lengths))
        dst.write(SceContainer(enc.codec, enc.mode, chunk_size, total, tuple(lengths),
                               b"").header_bytes())
        spool.seek(0)
        shutil.copyfileobj(spool, dst)
    return header


def decrypt_stream(src: BinaryIO, dst: BinaryIO, key: ChaosKey) -> ContainerHeader:
    """Decrypt a container from ``src`` one chunk at a time into ``dst``."""
    header = read_header(src)
    dec = Decryptor(key, header.codec, header.mode)
    pos = 0
    for size, plain_len in zip(header.chunk_lengths, header.plain_lengths()):
        body = _read_full(src, size)
        if len(body) != size:
            raise FormatError("container body is truncated")
        dst.write(_decrypt_chunk(dec, body, plain_len, pos))
        pos += size
    if src.read(1):
        raise FormatError("trailing bytes after container body")
    return header


def _read_full(src: BinaryIO, n: int) -> bytes:
    parts, got = [], 0
    while got < n:
        b = src.read(n - got)
        if not b:
            break
        parts.append(b)
        got += len(b)
    return b"".join(parts)


def pipeline_benchmark(corpus, key: ChaosKey, modes=tuple(PipelineMode),
                       codecs=(CodecId.STORE, CodecId.BASELINE),
                       chunk_size: int = DEFAULT_CHUNK, out=None) -> list[tuple]:
    """Rows of (mode, codec, ratio, encrypt s, decrypt s).

    The ratio is original length over container body length, so the fixed
    header and chunk table are not counted.
    """
    corpus = bytes(corpus)
    rows = []
    for mode in modes:
        for codec in codecs:
            t0 = time.perf_counter()
            c = encrypt(corpus, key, codec, mode, chunk_size)
            t1 = time.perf_counter()
            back = decrypt(c, key)
            t2 = time.perf_counter()
            if back != corpus:
                raise IntegrityMismatch("benchmark roundtrip failed")
            rows.append((PipelineMode(mode).name, CodecId(codec).name.lower(),
                         len(corpus) / len(c.body), t1 - t0, t2 - t1))
    if out is not None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["mode", "codec", "ratio", "encrypt_s", "decrypt_s"])
        w.writerows((m, cd, f"{r:.6f}", f"{a:.6f}", f"{b:.6f}") for m, cd, r, a, b in rows)
    return rows
