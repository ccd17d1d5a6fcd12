"""Seven tests from NIST SP 800-22 plus campaign and export helpers.

Implemented: Frequency (T0), BlockFrequency (T1), CumulativeSums (T2,
forward), Runs (T3), LongestRun (T4), ApproximateEntropy (T10) and Serial
(T13, first p-value).  The remaining tests of the suite run externally on
files written by ``export_bitstream``.

Samples are arrays of 0/1 values; bytes expand most-significant bit first.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from ..errors import InsufficientData
from .special import erfc, igamc

ALPHA = 0.01


def bits_from_bytes(data) -> np.ndarray:
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def _as_bits(sample) -> np.ndarray:
    if isinstance(sample, (bytes, bytearray, memoryview)):
        bits = np.frombuffer(bytes(sample), dtype=np.uint8)
        if bits.size and bits.max() > 1:
            raise ValueError("byte strings must hold 0/1 values; use bits_from_bytes")
        return bits
    bits = np.asarray(sample, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("a bit sample is one-dimensional")
    return bits


def frequency(bits) -> float:
    bits = _as_bits(bits)
    n = bits.size
    s = 2 * int(bits.sum()) - n
    return erfc(abs(s) / math.sqrt(2 * n))


def block_frequency(bits, m: int = 128) -> float:
    bits = _as_bits(bits)
    nblocks = bits.size // m
    if nblocks == 0:
        raise InsufficientData(f"block frequency needs at least {m} bits")
    pi = bits[:nblocks * m].reshape(nblocks, m).mean(axis=1)
    chi2 = 4.0 * m * float(np.sum((pi - 0.5) ** 2))
    return igamc(nblocks / 2, chi2 / 2)


def cumulative_sums(bits, reverse: bool = False) -> float:
    bits = _as_bits(bits)
    n = bits.size
    x = 2 * bits.astype(np.int64) - 1
    if reverse:
        x = x[::-1]
    z = int(np.max(np.abs(np.cumsum(x))))
    if z == 0:
        return 1.0
    nd = np.sqrt(n)
    phi = _normal_cdf
    total = 1.0
    for k in range(math.floor((-n / z + 1) / 4), math.floor((n / z - 1) / 4) + 1):
        total -= phi((4 * k + 1) * z / nd) - phi((4 * k - 1) * z / nd)
    for k in range(math.floor((-n / z - 3) / 4), math.floor((n / z - 1) / 4) + 1):
        total += phi((4 * k + 3) * z / nd) - phi((4 * k + 1) * z / nd)
    return min(max(total, 0.0), 1.0)


def _normal_cdf(x: float) -> float:
    return 0.5 * erfc(-x / math.sqrt(2))


def runs(bits) -> float:
    bits = _as_bits(bits)
    n = bits.size
    pi = bits.mean()
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return 0.0  # frequency prerequisite fails
    v = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    return erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))


@njit(cache=True)
def _longest_runs(bits, m, nblocks):
    out = np.empty(nblocks, dtype=np.int64)
    for b in range(nblocks):
        best = 0
        run = 0
        for i in range(b * m, (b + 1) * m):
            if bits[i]:
                run += 1
                if run > best:
                    best = run
            else:
                run = 0
        out[b] = best
    return out


# (minimum n, block length M, lowest class, class probabilities)
_LONGEST_RUN_TABLES = (
    (750_000, 10_000, 10, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6272, 128, 4, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, 1, (0.2148, 0.3672, 0.2305, 0.1875)),
)


def longest_run(bits) -> float:
    bits = _as_bits(bits)
    n = bits.size
    for min_n, m, lo, probs in _LONGEST_RUN_TABLES:
        if n >= min_n:
            break
    else:
        raise InsufficientData("longest run test needs at least 128 bits")
    nblocks = n // m
    k = len(probs) - 1
    longest = _longest_runs(bits, m, nblocks)
    v = np.bincount(np.clip(longest, lo, lo + k) - lo, minlength=k + 1)
    expected = nblocks * np.asarray(probs)
    chi2 = float(np.sum((v - expected) ** 2 / expected))
    return igamc(k / 2, chi2 / 2)


def _pattern_counts(bits: np.ndarray, m: int) -> np.ndarray:
    """Counts of every overlapping m-bit pattern, wrapping around the end."""
    if m == 0:
        return np.array([bits.size])
    n = bits.size
    ext = np.concatenate([bits, bits[:m - 1]]).astype(np.int64)
    vals = np.zeros(n, dtype=np.int64)
    for j in range(m):
        vals = (vals << 1) | ext[j:j + n]
    return np.bincount(vals, minlength=1 << m)


def approximate_entropy(bits, m: int | None = None) -> float:
    bits = _as_bits(bits)
    n = bits.size
    if m is None:
        # the suite asks for m < log2(n) - 5
        m = min(10, int(math.log2(n)) - 6) if n > 1 else 0
        if m < 1:
            raise InsufficientData(f"approximate entropy needs more than {n} bits")
    elif m < 1:
        raise ValueError("block length m must be positive")

    def phi(k):
        c = _pattern_counts(bits, k) / n
        c = c[c > 0]
        return float(np.sum(c * np.log(c)))

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2) - apen)
    return igamc(2 ** (m - 1), chi2 / 2)


def serial(bits, m: int | None = None) -> tuple[float, float]:
    bits = _as_bits(bits)
    n = bits.size
    if m is None:
        # the suite asks for m < log2(n) - 2
        m = min(16, int(math.log2(n)) - 3) if n > 1 else 0
        if m < 2:
            raise InsufficientData(f"serial test needs more than {n} bits")
    elif m < 2:
        raise ValueError("block length m must be at least 2")

    def psi2(k):
        if k <= 0:
            return 0.0
        c = _pattern_counts(bits, k).astype(np.float64)
        return float((2 ** k / n) * np.sum(c * c) - n)

    p0, p1, p2 = psi2(m), psi2(m - 1), psi2(m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    return igamc(2 ** (m - 2), d1 / 2), igamc(2 ** (m - 3), d2 / 2)


# id -> (name, minimum recommended length, function)
TESTS = {
    "T0": ("Frequency", 100, frequency),
    "T1": ("BlockFrequency", 100, block_frequency),
    "T2": ("CumulativeSums", 100, cumulative_sums),
    "T3": ("Runs", 100, runs),
    "T4": ("LongestRun", 128, longest_run),
    "T10": ("ApproximateEntropy", 1 << 12, approximate_entropy),
    "T13": ("Serial", 1 << 12, lambda b: serial(b)[0]),
}


def nist_subset(sample, test: str) -> float:
    """p-value of one implemented test; enforces the minimum sample length."""
    if test not in TESTS:
        raise KeyError(f"unknown or unimplemented test {test!r}")
    bits = _as_bits(sample)
    name, minimum, fn = TESTS[test]
    if bits.size < minimum:
        raise InsufficientData(f"{name} needs at least {minimum} bits, got {bits.size}")
    return fn(bits)


@dataclass
class NistCampaign:
    tests: tuple[str, ...]
    pvalues: np.ndarray  # samples x tests
    alpha: float
    length: int

    @property
    def samples(self) -> int:
        return self.pvalues.shape[0]

    @property
    def pass_rates(self) -> dict[str, float]:
        return {t: float(np.mean(self.pvalues[:, i] > self.alpha))
                for i, t in enumerate(self.tests)}

    def uniformity(self) -> dict[str, float]:
        """Chi-square p-value of each test's p-value histogram (10 bins)."""
        out = {}
        for i, t in enumerate(self.tests):
            counts = np.histogram(self.pvalues[:, i], bins=10, range=(0, 1))[0]
            expected = self.samples / 10
            chi2 = float(np.sum((counts - expected) ** 2 / expected))
            out[t] = igamc(4.5, chi2 / 2)
        return out

    def write_csv(self, out) -> None:
        """One row per sample, one column per test (heatmap-ready)."""
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["sample"] + [f"{t}_{TESTS[t][0]}" for t in self.tests])
        for s, row in enumerate(self.pvalues):
            w.writerow([s] + [f"{p:.6f}" for p in row])

    def table(self) -> str:
        lines = [f"{'test':<24}{'pass rate':>10}"]
        for t, rate in self.pass_rates.items():
            lines.append(f"{t + ' ' + TESTS[t][0]:<24}{rate:>10.3f}")
        return "\n".join(lines)


def nist_campaign(source, samples: int = 100, length: int = 1_000_000,
                  alpha: float = ALPHA, tests=tuple(TESTS)) -> NistCampaign:
    """Run every implemented test on ``samples`` consecutive ``length``-bit
    slices of ``source`` (ciphertext bytes, or an array of bits)."""
    if isinstance(source, (bytes, bytearray, memoryview)):
        bits = bits_from_bytes(source)
    else:
        bits = np.asarray(source, dtype=np.uint8)
    if bits.size < samples * length:
        raise InsufficientData(f"need {samples * length} bits, have {bits.size}")
    pv = np.empty((samples, len(tests)))
    for s in range(samples):
        chunk = bits[s * length:(s + 1) * length]
        for i, t in enumerate(tests):
            pv[s, i] = nist_subset(chunk, t)
    return NistCampaign(tuple(tests), pv, alpha, length)


def export_bitstream(data, path) -> None:
    """Write ASCII '0'/'1' characters, MSB first, as read by the NIST suite."""
    Path(path).write_bytes((bits_from_bytes(data) + ord("0")).tobytes())


def read_bitstream(path) -> np.ndarray:
    raw = np.frombuffer(Path(path).read_bytes(), dtype=np.uint8)
    raw = raw[(raw == ord("0")) | (raw == ord("1"))]
    return raw - ord("0")
