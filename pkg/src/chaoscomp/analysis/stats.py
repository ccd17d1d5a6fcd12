"""Correlation and similarity metrics and the sensitivity experiments."""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..codec import CodecId
from ..errors import SensitivityUnavailable, UndefinedCorrelation, UndefinedSimilarity
from ..keys import KEY_BITS, ChaosKey, validate_key
from ..permute import shuffle
from ..pipeline import DEFAULT_CHUNK, PipelineMode, encrypt

MAX_RETRIES = 32


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    a = np.frombuffer(x, dtype=np.uint8) if isinstance(x, (bytes, bytearray)) else np.asarray(x)
    b = np.frombuffer(y, dtype=np.uint8) if isinstance(y, (bytes, bytearray)) else np.asarray(y)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("sequences must be one-dimensional and of equal length")
    return a.astype(np.float64), b.astype(np.float64)


def pearson_cc(x, y) -> float:
    a, b = _pair(x, y)
    if a.size < 2:
        raise UndefinedCorrelation("need at least two values")
    a = a - a.mean()
    b = b - b.mean()
    den = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if den == 0:
        raise UndefinedCorrelation("a sequence is constant")
    return float(np.clip(np.dot(a, b) / den, -1.0, 1.0))


def cosine_similarity(x, y) -> float:
    """X.Y / (|X| |Y|) on the raw values, without centering."""
    a, b = _pair(x, y)
    den = np.linalg.norm(a) * np.linalg.norm(b)
    if den == 0:
        raise UndefinedSimilarity("a vector is all zeros")
    return float(np.clip(np.dot(a, b) / den, -1.0, 1.0))


def csi_baseline(x, y) -> float:
    """Cosine similarity expected if x and y were independent.

    Byte vectors are non-negative, so unrelated sequences still score about
    0.75 for uniform bytes; this is n * mean(x) * mean(y) / (|x| |y|).
    """
    a, b = _pair(x, y)
    den = np.linalg.norm(a) * np.linalg.norm(b)
    if den == 0:
        raise UndefinedSimilarity("a vector is all zeros")
    return float(a.size * a.mean() * b.mean() / den)


@dataclass(frozen=True)
class SensitivityResult:
    cc: float
    csi: float
    csi_deviation: float
    length_a: int
    length_b: int
    bit: int | None

    @property
    def compared(self) -> int:
        return min(self.length_a, self.length_b)


def _compare(c1: bytes, c2: bytes, bit) -> SensitivityResult:
    n = min(len(c1), len(c2))
    a, b = c1[:n], c2[:n]
    csi = cosine_similarity(a, b)
    return SensitivityResult(pearson_cc(a, b), csi, csi - csi_baseline(a, b),
                             len(c1), len(c2), bit)


def _cipher(codec, mode, chunk_size) -> Callable[[bytes, ChaosKey], bytes]:
    def run(p: bytes, k: ChaosKey) -> bytes:
        return encrypt(p, k, codec, mode, chunk_size).body
    return run


def _valid(k: ChaosKey) -> bool:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return not validate_key(k)


def flip_key_bit(k: ChaosKey, bit: int) -> tuple[ChaosKey, int]:
    """Flip ``bit``, or the nearest neighbour whose flip leaves a valid key.

    Neighbours are tried in the order bit+1, bit-1, bit+2, ... for up to
    32 candidates in all.
    """
    candidates = [bit]
    step = 1
    while len(candidates) < MAX_RETRIES:
        for c in (bit + step, bit - step):
            if 0 <= c < KEY_BITS and len(candidates) < MAX_RETRIES:
                candidates.append(c)
        step += 1
    for c in candidates:
        flipped = k.with_bit_flipped(c)
        if _valid(flipped):
            return flipped, c
    raise SensitivityUnavailable(f"no valid key within {MAX_RETRIES} bits of bit {bit}")


def key_sensitivity(p, k: ChaosKey, bit: int | None, codec=CodecId.BASELINE,
                    mode=PipelineMode.SCE, chunk_size: int = DEFAULT_CHUNK) -> SensitivityResult:
    """Compare ciphertext bodies of ``p`` under ``k`` and ``k`` with one bit flipped.

    ``bit=None`` flips nothing (a self-check that yields (1, 1)).
    """
    enc = _cipher(codec, mode, chunk_size)
    p = bytes(p)
    c1 = enc(p, k)
    if bit is None:
        return _compare(c1, c1, None)
    k2, used = flip_key_bit(k, bit)
    return _compare(c1, enc(p, k2), used)


def flip_plaintext_bit(p: bytes, bit: int) -> bytes:
    """Flip bit ``bit`` counted from the start, LSB first within each byte."""
    q = bytearray(p)
    q[bit // 8] ^= 1 << (bit % 8)
    return bytes(q)


def plaintext_sensitivity(p, k: ChaosKey, bit: int | None, codec=CodecId.BASELINE,
                          mode=PipelineMode.SCE,
                          chunk_size: int = DEFAULT_CHUNK) -> SensitivityResult:
    """Compare ciphertext bodies of ``p`` and ``p`` with one bit flipped.

    Compression may change the body length; the common prefix is compared
    and both lengths are reported.
    """
    enc = _cipher(codec, mode, chunk_size)
    p = bytes(p)
    c1 = enc(p, k)
    if bit is None:
        return _compare(c1, c1, None)
    if not 0 <= bit < 8 * len(p):
        raise IndexError("plaintext bit out of range")
    return _compare(c1, enc(flip_plaintext_bit(p, bit), k), bit)


def plain_cipher_correlation(p, k: ChaosKey, encrypt_fn=None, codec=CodecId.BASELINE,
                             mode=PipelineMode.SCE, chunk_size: int = DEFAULT_CHUNK) -> float:
    """Pearson CC between plaintext and ciphertext body over the common prefix.

    ``encrypt_fn(p, k) -> bytes`` replaces the pipeline, e.g. with an
    identity stub to check the harness itself.
    """
    p = bytes(p)
    c = (encrypt_fn or _cipher(codec, mode, chunk_size))(p, k)
    n = min(len(p), len(c))
    return pearson_cc(p[:n], c[:n])


def weak_cipher(p: bytes, k: ChaosKey) -> bytes:
    """Permute, then XOR with the Henon keystream: no chaining, no compression.

    This is the shape of cipher that satisfies C1^C2 = Perm(P1^P2) and serves
    as the positive control for ``chen_property_check``.
    """
    shuffled = np.frombuffer(shuffle(p, k.logistic(), k.threshold), dtype=np.uint8)
    return (shuffled ^ k.henon().take(len(p))).tobytes()


def chen_property_check(k: ChaosKey, trials: int = 100, length: int = 4096,
                        cipher=None, seed: int | None = None) -> int:
    """Count trials in which C1 ^ C2 equals Perm_K(P1 ^ P2).

    Each trial draws two distinct random plaintexts, encrypts both from the
    start of the keystream, and permutes P1 ^ P2 with a fresh generator at
    the same position.  The default cipher is the SCE pipeline with the
    store codec, so ciphertext and plaintext lengths agree.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    cipher = cipher or _cipher(CodecId.STORE, PipelineMode.SCE, DEFAULT_CHUNK)
    rng = random.Random(seed)
    holds = 0
    for _ in range(trials):
        p1 = rng.randbytes(length)
        p2 = rng.randbytes(length)
        while p2 == p1:
            p2 = rng.randbytes(length)
        c1, c2 = cipher(p1, k), cipher(p2, k)
        if len(c1) != len(c2):
            continue
        lhs = bytes(a ^ b for a, b in zip(c1, c2))
        rhs = shuffle(bytes(a ^ b for a, b in zip(p1, p2)), k.logistic(), k.threshold)
        holds += lhs == rhs
    return holds
