"""32-bit two's-complement fixed-point words with per-map Q formats.

A word in format ``Q<F>`` has one sign bit, ``F`` integer bits and
``31 - F`` fractional bits, so it represents ``raw / 2**(31 - F)`` over the
range ``[-2**F, 2**F)``.  Multiplication truncates toward negative infinity
and every overflow saturates and raises the ``saturated`` flag instead of
wrapping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .errors import QFormatMismatch

RAW_MIN = -(1 << 31)
RAW_MAX = (1 << 31) - 1

# integer-bit counts used by the cipher maps
Q_LOGISTIC = 2
Q_HENON = 4
Q_LORENZ = 10
QFORMATS = (Q_LOGISTIC, Q_HENON, Q_LORENZ)


def frac_bits(qformat: int) -> int:
    return 31 - qformat


def _saturate(raw: int) -> tuple[int, bool]:
    if raw > RAW_MAX:
        return RAW_MAX, True
    if raw < RAW_MIN:
        return RAW_MIN, True
    return raw, False


@dataclass(frozen=True)
class Fx32:
    raw: int
    qformat: int
    saturated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.qformat not in QFORMATS:
            raise ValueError(f"unsupported Q format {self.qformat}")
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValueError(f"raw word {self.raw} does not fit in 32 bits")

    @classmethod
    def from_value(cls, value, qformat: int) -> "Fx32":
        """Quantize ``value`` (int, str, float or Fraction) by truncation.

        Strings are parsed as exact decimals, so ``"3.98"`` is not subject to
        binary floating-point rounding before quantization.
        """
        exact = Fraction(value)
        raw = (exact.numerator << frac_bits(qformat)) // exact.denominator
        raw, sat = _saturate(raw)
        return cls(raw, qformat, sat)

    @classmethod
    def from_u32(cls, word: int, qformat: int) -> "Fx32":
        word &= 0xFFFFFFFF
        return cls(word - (1 << 32) if word & 0x80000000 else word, qformat)

    @property
    def u32(self) -> int:
        return self.raw & 0xFFFFFFFF

    @property
    def ulp(self) -> Fraction:
        return Fraction(1, 1 << frac_bits(self.qformat))

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, 1 << frac_bits(self.qformat))

    def __float__(self) -> float:
        return self.raw / (1 << frac_bits(self.qformat))

    def __repr__(self) -> str:
        flag = ", saturated" if self.saturated else ""
        return f"Fx32(Q{self.qformat}: {float(self):.9g} raw=0x{self.u32:08x}{flag})"

    def __mul__(self, other: "Fx32") -> "Fx32":
        return fx_mul(self, other)

    def __add__(self, other: "Fx32") -> "Fx32":
        return fx_add(self, other)

    def __sub__(self, other: "Fx32") -> "Fx32":
        return fx_sub(self, other)

    def __neg__(self) -> "Fx32":
        return fx_neg(self)


def _check(a: Fx32, b: Fx32) -> int:
    if a.qformat != b.qformat:
        raise QFormatMismatch(f"Q{a.qformat} operand combined with Q{b.qformat}")
    return a.qformat


def fx_mul(a: Fx32, b: Fx32) -> Fx32:
    q = _check(a, b)
    raw, sat = _saturate((a.raw * b.raw) >> frac_bits(q))
    return Fx32(raw, q, sat)


def fx_add(a: Fx32, b: Fx32) -> Fx32:
    q = _check(a, b)
    raw, sat = _saturate(a.raw + b.raw)
    return Fx32(raw, q, sat)


def fx_sub(a: Fx32, b: Fx32) -> Fx32:
    q = _check(a, b)
    raw, sat = _saturate(a.raw - b.raw)
    return Fx32(raw, q, sat)


def fx_neg(a: Fx32) -> Fx32:
    raw, sat = _saturate(-a.raw)
    return Fx32(raw, a.qformat, sat)


def fx_low_byte(a: Fx32) -> int:
    return a.raw & 0xFF


# ---------------------------------------------------------------------------
# golden vectors: "qformat op rawA rawB rawResult flag", lowercase hex

class GoldenVector(NamedTuple):
    qformat: int
    op: str
    a: int
    b: int
    result: int
    flag: bool


_OPS = {
    "mul": fx_mul,
    "add": fx_add,
    "sub": fx_sub,
    "neg": lambda a, _b: fx_neg(a),
}


def format_golden(v: GoldenVector) -> str:
    return (f"{v.qformat:x} {v.op} {v.a & 0xFFFFFFFF:08x} {v.b & 0xFFFFFFFF:08x} "
            f"{v.result & 0xFFFFFFFF:08x} {int(v.flag):x}")


def parse_golden(line: str) -> GoldenVector:
    q, op, a, b, r, flag = line.split()
    if op not in _OPS:
        raise ValueError(f"unknown golden op {op!r}")
    qf = int(q, 16)
    return GoldenVector(qf, op, Fx32.from_u32(int(a, 16), qf).raw,
                        Fx32.from_u32(int(b, 16), qf).raw,
                        Fx32.from_u32(int(r, 16), qf).raw, bool(int(flag, 16)))


def read_golden(path) -> Iterator[GoldenVector]:
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield parse_golden(line)


def write_golden(path, vectors: Iterable[GoldenVector]) -> None:
    Path(path).write_text("".join(format_golden(v) + "\n" for v in vectors))


def evaluate_golden(v: GoldenVector) -> Fx32:
    """Recompute one golden vector with this platform's arithmetic."""
    return _OPS[v.op](Fx32(v.a, v.qformat), Fx32(v.b, v.qformat))
