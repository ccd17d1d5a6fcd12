"""Secret key structure, validation, key files and keyspace arithmetic.

A key holds 12 fixed-point words across three maps plus a threshold byte
(13 components in all):

    kp  (permutation, Logistic Q2.29): x0, mu, threshold T
    ks1 (substitution, Henon Q4.27):   x0, y0, a, b
    ks2 (substitution, Lorenz Q10.21): x0, y0, z0, sigma, rho, beta

Key file layout (58 bytes)::

    0   4  magic b"SOCK"
    4   1  version 0x01
    5  48  12 big-endian u32 raw words in the order above (T excluded)
   53   1  threshold T
   54   4  big-endian CRC-32 of bytes 0..53

The CRC catches corruption only; the file is not authenticated.
"""
from __future__ import annotations

import random
import struct
import warnings
import zlib
from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .chaos import WARMUP, HenonState, LogisticState, LorenzState, MapGenerator
from .errors import InvalidKey, KeyFormatError, KeyGenFailure
from .fxp import Q_HENON, Q_LOGISTIC, Q_LORENZ, Fx32, frac_bits

MAGIC = b"SOCK"
VERSION = 1
KEY_FILE_SIZE = 58
N_WORDS = 12
# bits 0..383 address the fixed-point words, 384..391 the threshold byte
KEY_BITS = 32 * N_WORDS + 8

# orbits must not close into a cycle shorter than MIN_PERIOD within
# CYCLE_HORIZON iterations after warm-up
CYCLE_HORIZON = 1 << 16
MIN_PERIOD = 1 << 12

MAX_ATTEMPTS = 1000


class DegenerateThresholdWarning(UserWarning):
    pass


def _F(v: str) -> Fraction:
    return Fraction(v)


# (component, qformat, lo, hi, hi_inclusive); ranges define the valid box
COMPONENTS = (
    ("kp.x0", Q_LOGISTIC, _F(0), _F(1), False),
    ("kp.mu", Q_LOGISTIC, _F("3.57"), _F(4), False),
    ("ks1.x0", Q_HENON, _F(-2), _F(2), False),
    ("ks1.y0", Q_HENON, _F(-2), _F(2), False),
    ("ks1.a", Q_HENON, _F("1.35"), _F("1.42"), True),
    ("ks1.b", Q_HENON, _F("0.25"), _F("0.31"), True),
    ("ks2.x0", Q_LORENZ, _F(-30), _F(30), True),
    ("ks2.y0", Q_LORENZ, _F(-30), _F(30), True),
    ("ks2.z0", Q_LORENZ, _F(0), _F(60), True),
    ("ks2.sigma", Q_LORENZ, _F("9.5"), _F("10.5"), True),
    ("ks2.rho", Q_LORENZ, _F(27), _F(29), True),
    ("ks2.beta", Q_LORENZ, _F("2.5"), _F("2.8"), True),
)
COMPONENT_NAMES = tuple(c[0] for c in COMPONENTS)

# keygen draws initial conditions from a tighter box than validation accepts
_KEYGEN_BOX = {
    "kp.x0": (_F("0.01"), _F("0.99")),
    "ks1.x0": (_F(-1), _F(1)),
    "ks1.y0": (_F("-0.3"), _F("0.3")),
    "ks2.x0": (_F(-15), _F(15)),
    "ks2.y0": (_F(-20), _F(20)),
    "ks2.z0": (_F(5), _F(45)),
}


@dataclass(frozen=True, repr=False)
class PermutationKey:
    x0: Fx32
    mu: Fx32
    threshold: int

    def __repr__(self):
        return "PermutationKey(<redacted>)"


@dataclass(frozen=True, repr=False)
class HenonKey:
    x0: Fx32
    y0: Fx32
    a: Fx32
    b: Fx32

    def __repr__(self):
        return "HenonKey(<redacted>)"


@dataclass(frozen=True, repr=False)
class LorenzKey:
    x0: Fx32
    y0: Fx32
    z0: Fx32
    sigma: Fx32
    rho: Fx32
    beta: Fx32

    def __repr__(self):
        return "LorenzKey(<redacted>)"


@dataclass(frozen=True, repr=False)
class ChaosKey:
    kp: PermutationKey
    ks1: HenonKey
    ks2: LorenzKey

    def __repr__(self):
        return "ChaosKey(<redacted>)"

    @property
    def threshold(self) -> int:
        return self.kp.threshold

    def components(self) -> list[Fx32]:
        """The 12 fixed-point words in key-file order."""
        return ([self.kp.x0, self.kp.mu]
                + [getattr(self.ks1, f.name) for f in fields(HenonKey)]
                + [getattr(self.ks2, f.name) for f in fields(LorenzKey)])

    def words(self) -> list[int]:
        return [c.raw for c in self.components()]

    @classmethod
    def from_words(cls, words, threshold: int) -> "ChaosKey":
        if len(words) != N_WORDS:
            raise ValueError(f"expected {N_WORDS} words")
        fx = [Fx32(int(w), c[1]) for w, c in zip(words, COMPONENTS)]
        return cls(PermutationKey(fx[0], fx[1], int(threshold)),
                   HenonKey(*fx[2:6]), LorenzKey(*fx[6:12]))

    @classmethod
    def from_values(cls, logistic, henon, lorenz, threshold: int) -> "ChaosKey":
        """Build a key from decimal values, e.g. ``logistic=("0.3", "3.98")``."""
        values = list(logistic) + list(henon) + list(lorenz)
        words = [Fx32.from_value(v, c[1]).raw for v, c in zip(values, COMPONENTS)]
        return cls.from_words(words, threshold)

    def with_bit_flipped(self, bit: int) -> "ChaosKey":
        """Flip one key bit: word ``bit // 32``, bit ``bit % 32`` counted
        from the least significant end; bits from 384 on address T."""
        if not 0 <= bit < KEY_BITS:
            raise IndexError(f"key bit {bit} out of range")
        if bit >= 32 * N_WORDS:
            return self.with_threshold(self.threshold ^ (1 << (bit - 32 * N_WORDS)))
        words = [w & 0xFFFFFFFF for w in self.words()]
        words[bit // 32] ^= 1 << (bit % 32)
        words = [w - (1 << 32) if w & 0x80000000 else w for w in words]
        return ChaosKey.from_words(words, self.threshold)

    def with_threshold(self, threshold: int) -> "ChaosKey":
        return ChaosKey(PermutationKey(self.kp.x0, self.kp.mu, threshold), self.ks1, self.ks2)

    # generator factories; each call starts a fresh, warmed-up stream
    def logistic_state(self) -> LogisticState:
        return LogisticState(self.kp.x0, self.kp.mu)

    def henon_state(self) -> HenonState:
        return HenonState(self.ks1.x0, self.ks1.y0, self.ks1.a, self.ks1.b)

    def lorenz_state(self) -> LorenzState:
        k = self.ks2
        return LorenzState(k.x0, k.y0, k.z0, k.sigma, k.rho, k.beta)

    def logistic(self) -> MapGenerator:
        return MapGenerator(self.logistic_state())

    def henon(self) -> MapGenerator:
        return MapGenerator(self.henon_state())

    def lorenz(self) -> MapGenerator:
        return MapGenerator(self.lorenz_state())


def _in_range(value: Fraction, lo, hi, hi_inclusive) -> bool:
    return lo <= value and (value <= hi if hi_inclusive else value < hi)


def _dynamics_violations(name: str, state) -> list[str]:
    g = MapGenerator(state, warmup=0)
    raw = g._raw().copy()
    traj = K.trajectory(raw.copy(), g._kind, WARMUP)
    if traj.shape[0] < WARMUP:
        return [f"{name}: trajectory saturates during warm-up"]
    if np.unique(traj, axis=0).shape[0] < WARMUP:
        return [f"{name}: state repeats during warm-up"]
    K.advance(raw, g._kind, WARMUP)
    period = K.cycle_period(raw, g._kind, CYCLE_HORIZON)
    if period < 0:
        return [f"{name}: trajectory saturates after warm-up"]
    if 0 < period < MIN_PERIOD:
        return [f"{name}: orbit falls into a cycle of length {period} < {MIN_PERIOD}"]
    return []


def validate_key(k: ChaosKey) -> list[str]:
    """Return the list of violations (empty when the key is valid).

    Checks each component's Q format and range, rejects fixed-point seeds,
    then runs every map through the warm-up looking for saturation or
    repeated states, and finally requires the post-warm-up orbit not to
    close into a short cycle.
    """
    problems = []
    for comp, (name, q, lo, hi, hi_inc) in zip(k.components(), COMPONENTS):
        if comp.qformat != q:
            problems.append(f"{name}: expected Q{q} word")
        elif not _in_range(comp.to_fraction(), lo, hi, hi_inc):
            close = "]" if hi_inc else ")"
            what = "outside chaotic range" if name == "kp.mu" else "outside valid range"
            problems.append(f"{name}: {what} [{float(lo):g},{float(hi):g}{close}")
    if not 0 <= k.threshold <= 255:
        problems.append("kp.threshold: not a byte")
    x0 = k.kp.x0.to_fraction()
    if x0 in (0, 1):
        problems.append("kp.x0: fixed point seed")
    elif x0 == Fraction(1, 2):
        problems.append("kp.x0: degenerate seed 1/2")
    if k.ks2.x0.raw == k.ks2.y0.raw == k.ks2.z0.raw == 0:
        problems.append("ks2 seed: fixed point (0,0,0)")
    if problems:
        return problems
    if k.threshold in (0, 255):
        warnings.warn("threshold 0 or 255 makes the first shuffle phase all-or-nothing",
                      DegenerateThresholdWarning, stacklevel=2)
    problems += _dynamics_violations("logistic", k.logistic_state())
    problems += _dynamics_violations("henon", k.henon_state())
    problems += _dynamics_violations("lorenz", k.lorenz_state())
    return problems


def require_valid(k: ChaosKey) -> ChaosKey:
    problems = validate_key(k)
    if problems:
        raise InvalidKey(problems)
    return k


def _uniform_raw(rng: random.Random, lo: Fraction, hi: Fraction, q: int) -> int:
    fb = frac_bits(q)
    lo_raw = -((-lo.numerator << fb) // lo.denominator)  # ceil
    hi_raw = (hi.numerator << fb) // hi.denominator
    return rng.randint(lo_raw, hi_raw - 1)


def keygen(rng: random.Random | None = None) -> ChaosKey:
    """Draw a valid key by rejection sampling.

    ``rng`` defaults to ``random.SystemRandom``; pass a seeded
    ``random.Random`` for reproducible keys.  Raises ``KeyGenFailure`` after
    ``MAX_ATTEMPTS`` rejected candidates.
    """
    rng = rng or random.SystemRandom()
    for _ in range(MAX_ATTEMPTS):
        words = []
        for name, q, lo, hi, _inc in COMPONENTS:
            lo, hi = _KEYGEN_BOX.get(name, (lo, hi))
            words.append(_uniform_raw(rng, lo, hi, q))
        key = ChaosKey.from_words(words, rng.randint(1, 254))
        if not validate_key(key):
            return key
    raise KeyGenFailure(f"no valid key after {MAX_ATTEMPTS} candidates")


def serialize_key(k: ChaosKey) -> bytes:
    body = MAGIC + bytes([VERSION]) + struct.pack(">12I", *(c.u32 for c in k.components()))
    body += bytes([k.threshold])
    return body + struct.pack(">I", zlib.crc32(body))


def parse_key(buf: bytes, validate: bool = True) -> ChaosKey:
    buf = bytes(buf)
    if len(buf) != KEY_FILE_SIZE:
        raise KeyFormatError(f"key file must be {KEY_FILE_SIZE} bytes, got {len(buf)}")
    if buf[:4] != MAGIC:
        raise KeyFormatError("bad key magic")
    if buf[4] != VERSION:
        raise KeyFormatError(f"unsupported key version {buf[4]}")
    (crc,) = struct.unpack(">I", buf[54:58])
    if zlib.crc32(buf[:54]) != crc:
        raise KeyFormatError("key checksum mismatch")
    words = [Fx32.from_u32(w, c[1]).raw
             for w, c in zip(struct.unpack(">12I", buf[5:53]), COMPONENTS)]
    key = ChaosKey.from_words(words, buf[53])
    if validate:
        problems = validate_key(key)
        if problems:
            raise InvalidKey(problems)
    return key


def keyspace_exponent(precision_digits: int, components: int) -> int:
    """Base-10 exponent of the keyspace: each component contributes
    ``precision_digits`` decimal digits of freedom."""
    if precision_digits < 1:
        raise ValueError("precision_digits must be >= 1")
    if components < 0:
        raise ValueError("components must be >= 0")
    return components * precision_digits
