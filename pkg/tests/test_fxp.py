from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chaoscomp.errors import QFormatMismatch
from chaoscomp.fxp import (RAW_MAX, RAW_MIN, Fx32, GoldenVector, format_golden, fx_add,
                           fx_low_byte, fx_mul, fx_neg, fx_sub, parse_golden, read_golden,
                           evaluate_golden)

from conftest import FIXTURES

raw = st.integers(RAW_MIN, RAW_MAX)
qf = st.sampled_from([2, 4, 10])


def test_half_times_half_is_quarter():
    h = Fx32(0x10000000, 2)
    assert fx_mul(h, h).raw == 0x08000000
    assert float(fx_mul(h, h)) == 0.25


@given(raw, qf)
def test_zero_annihilates(a, q):
    assert fx_mul(Fx32(a, q), Fx32(0, q)).raw == 0


def test_product_inside_range_does_not_saturate():
    # 1.9 * 1.9 = 3.61 lies inside [-4, 4), so Q2.29 represents it
    a = Fx32.from_value("1.9", 2)
    r = fx_mul(a, a)
    assert not r.saturated
    exact = a.to_fraction() ** 2
    assert r.to_fraction() <= exact < r.to_fraction() + r.ulp


def test_product_outside_range_saturates():
    r = fx_mul(Fx32.from_value(3, 2), Fx32.from_value("1.5", 2))
    assert r.saturated and r.raw == RAW_MAX
    r = fx_mul(Fx32.from_value(-3, 2), Fx32.from_value("1.5", 2))
    assert r.saturated and r.raw == RAW_MIN


def test_add_identity_inverse_and_saturation():
    a = Fx32(123456789, 4)
    assert fx_add(a, Fx32(0, 4)) == a
    assert fx_add(a, fx_neg(a)).raw == 0
    big = Fx32(RAW_MAX - 5, 4)
    s = fx_add(big, big)
    assert s.saturated and s.raw == RAW_MAX
    assert fx_neg(Fx32(RAW_MIN, 4)).saturated


def test_mismatched_formats_rejected():
    with pytest.raises(QFormatMismatch):
        fx_mul(Fx32(1, 2), Fx32(1, 4))
    with pytest.raises(QFormatMismatch):
        Fx32(1, 2) + Fx32(1, 10)


@pytest.mark.parametrize("word,byte", [(0x12345678, 0x78), (0, 0), (0xFFFFFF01 - (1 << 32), 0x01)])
def test_low_byte(word, byte):
    assert fx_low_byte(Fx32(word, 2)) == byte


@given(raw, raw, qf)
def test_truncation_toward_negative_infinity(a, b, q):
    x, y = Fx32(a, q), Fx32(b, q)
    r = fx_mul(x, y)
    exact = x.to_fraction() * y.to_fraction()
    lo, hi = Fraction(RAW_MIN) * r.ulp, Fraction(RAW_MAX + 1) * r.ulp
    assert r.saturated == (not lo <= exact < hi)
    if not r.saturated:
        assert r.to_fraction() <= exact < r.to_fraction() + r.ulp


@given(raw, raw, qf)
def test_add_sub_flag_iff_out_of_range(a, b, q):
    for op, exact in ((fx_add, a + b), (fx_sub, a - b)):
        r = op(Fx32(a, q), Fx32(b, q))
        assert r.saturated == (not RAW_MIN <= exact <= RAW_MAX)
        if not r.saturated:
            assert r.raw == exact


def test_golden_vectors_bit_exact():
    vectors = list(read_golden(FIXTURES / "fx_golden.txt"))
    assert len(vectors) == 10_000
    for v in vectors:
        r = evaluate_golden(v)
        assert (r.raw, r.saturated) == (v.result, v.flag), format_golden(v)


def test_golden_line_roundtrip():
    v = GoldenVector(10, "mul", -5, 7, -1, False)
    line = format_golden(v)
    assert line == "a mul fffffffb 00000007 ffffffff 0"
    assert parse_golden(line) == v


def test_from_value_parses_decimal_strings_exactly():
    assert Fx32.from_value("0.5", 2).raw == 1 << 28
    assert Fx32.from_value("-0.5", 2).raw == -(1 << 28)
    # floor, not round: 0.1 is below the next grid point
    assert Fx32.from_value("0.1", 2).to_fraction() <= Fraction(1, 10)
