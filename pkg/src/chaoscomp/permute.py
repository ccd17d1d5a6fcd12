"""Keyed block permutation driven by the Logistic keystream.

Each block of up to 64 bytes is split at ``mid = n // 2``.  A first pass
walks ``srt`` over the lower half and swaps ``b[srt]`` with ``b[mid]`` (then
advances ``mid``) whenever the next keystream byte exceeds the threshold T.
Once either half is exhausted, a Fisher-Yates pass shuffles what is left of
the upper half with ``pos = mid + byte % (n - mid)``.

The keystream bytes drawn depend only on the keystream, ``n`` and T, never
on the data, so decryption can replay the exact same index permutation and
invert it.  One running Logistic generator serves every block of a stream.
"""
from __future__ import annotations

import numpy as np

from . import _kernels as K
from .chaos import MapGenerator
from .errors import DivergentTrajectory

BLOCK = 64


def _check_generator(g: MapGenerator) -> None:
    if g.kind != "logistic":
        raise TypeError("the permutation draws from a logistic generator")


def permutation_indices(n: int, g: MapGenerator, threshold: int,
                        block: int = BLOCK) -> np.ndarray:
    """Source index of every output position for an ``n``-byte buffer.

    Advances ``g`` by exactly the number of bytes the shuffle consumes.
    """
    _check_generator(g)
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must be a byte")
    trace = np.empty(n, dtype=np.int64)
    drawn, ok = K.permutation_trace(n, g._raw(), threshold, block, trace)
    g._account(drawn)
    if not ok:
        raise DivergentTrajectory("logistic map saturated")
    return trace


def shuffle(data, g: MapGenerator, threshold: int, block: int = BLOCK) -> bytes:
    """Shuffle ``data`` block by block (a short tail block is allowed)."""
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    return buf[permutation_indices(buf.size, g, threshold, block)].tobytes()


def deshuffle(data, g: MapGenerator, threshold: int, block: int = BLOCK) -> bytes:
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    out = np.empty_like(buf)
    out[permutation_indices(buf.size, g, threshold, block)] = buf
    return out.tobytes()


def shuffle_block(b, g: MapGenerator, threshold: int) -> tuple[bytes, list[int]]:
    """Shuffle a single block of 1..64 bytes, one keystream byte at a time.

    Returns the shuffled block and its trace ``pi`` (``out[i] = b[pi[i]]``).
    This is the direct, unaccelerated form of the algorithm; ``shuffle``
    produces identical output for whole streams.
    """
    _check_generator(g)
    b = bytearray(b)
    n = len(b)
    if not 1 <= n <= BLOCK:
        raise ValueError("block length must be in [1, 64]")
    pi = list(range(n))
    half = n // 2
    srt, mid = 0, half
    while srt != half and mid != n:
        if g.next_byte() > threshold:
            b[srt], b[mid] = b[mid], b[srt]
            pi[srt], pi[mid] = pi[mid], pi[srt]
            mid += 1
        srt += 1
    while mid != n:
        pos = mid + g.next_byte() % (n - mid)
        b[mid], b[pos] = b[pos], b[mid]
        pi[mid], pi[pos] = pi[pos], pi[mid]
        mid += 1
    return bytes(b), pi


def deshuffle_block(b, g: MapGenerator, threshold: int) -> bytes:
    """Invert ``shuffle_block`` given a generator at the same position."""
    _, pi = shuffle_block(bytes(len(b)), g, threshold)
    out = bytearray(len(b))
    for i, src in enumerate(pi):
        out[src] = b[i]
    return bytes(out)
