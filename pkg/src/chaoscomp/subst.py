"""Chained substitution over compressed bytes: Henon XOR, add, Lorenz XOR.

For each byte ``d``::

    t = d ^ H          # Henon keystream byte
    u = (t + prev) & 0xFF
    C = u ^ L          # Lorenz keystream byte
    prev = C

``prev`` starts at zero and carries across calls, so feeding a stream in
pieces gives the same result as feeding it whole.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .chaos import MapGenerator
from .errors import DivergentTrajectory


@dataclass
class SubstState:
    henon: MapGenerator
    lorenz: MapGenerator
    prev: int = 0

    def __post_init__(self):
        if self.henon.kind != "henon" or self.lorenz.kind != "lorenz":
            raise TypeError("SubstState needs a henon and a lorenz generator")


def _run(kernel, data, s: SubstState) -> bytes:
    src = np.frombuffer(bytes(data), dtype=np.uint8)
    out = np.empty_like(src)
    prev, done = kernel(src, out, s.henon._raw(), s.lorenz._raw(), s.prev)
    s.henon._account(done)
    s.lorenz._account(done)
    s.prev = int(prev)
    if done < src.size:
        raise DivergentTrajectory(f"substitution keystream saturated at byte {done}")
    return out.tobytes()


def substitute(data, s: SubstState) -> bytes:
    return _run(K.substitute, data, s)


def desubstitute(data, s: SubstState) -> bytes:
    return _run(K.desubstitute, data, s)


def substitute_reference(data, h: list[int], l: list[int], prev: int = 0) -> bytes:
    """The recurrence spelled out over explicit keystream byte lists."""
    out = bytearray()
    for d, hb, lb in zip(data, h, l, strict=True):
        prev = (((d ^ hb) + prev) & 0xFF) ^ lb
        out.append(prev)
    return bytes(out)
