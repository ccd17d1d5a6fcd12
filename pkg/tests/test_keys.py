import os
import random
import warnings

import pytest

from chaoscomp import keys
from chaoscomp.errors import InvalidKey, KeyFormatError
from chaoscomp.keys import (KEY_BITS, KEY_FILE_SIZE, ChaosKey, DegenerateThresholdWarning,
                            keygen, keyspace_exponent, parse_key, serialize_key, validate_key)

from conftest import fixed_keys

REF = (["0.3", "3.98"], ["0.1", "0.1", "1.4", "0.3"], ["1", "1", "1", "10", "28", "2.67"])


def test_fixed_keys_validate():
    for k in fixed_keys().values():
        assert validate_key(k) == []


def test_serialization_roundtrip(key):
    blob = serialize_key(key)
    assert len(blob) == KEY_FILE_SIZE == 58
    assert blob[:4] == b"SOCK" and blob[4] == 1
    assert parse_key(blob) == key


@pytest.mark.parametrize("mutate,match", [
    (lambda b: b[:-1], "58 bytes"),
    (lambda b: b"XOCK" + b[4:], "magic"),
    (lambda b: b[:4] + b"\x02" + b[5:], "version"),
    (lambda b: b[:10] + bytes([b[10] ^ 1]) + b[11:], "checksum"),
])
def test_parse_rejects_damaged_files(key, mutate, match):
    with pytest.raises(KeyFormatError, match=match):
        parse_key(mutate(serialize_key(key)))


def test_parse_validates_unless_asked_not_to():
    k = ChaosKey.from_values(["0.3", "3.2"], *REF[1:], 128)
    blob = serialize_key(k)
    with pytest.raises(InvalidKey):
        parse_key(blob)
    assert parse_key(blob, validate=False) == k


@pytest.mark.parametrize("logistic,message", [
    (["0.3", "3.5"], "kp.mu: outside chaotic range"),
    (["0", "3.9"], "kp.x0"),
    (["0.5", "3.9"], "degenerate seed 1/2"),
])
def test_logistic_violations(logistic, message):
    k = ChaosKey.from_values(logistic, *REF[1:], 128)
    assert any(message in v for v in validate_key(k))


def test_lorenz_origin_rejected():
    k = ChaosKey.from_values(REF[0], REF[1], ["0", "0", "0", "10", "28", "2.67"], 128)
    assert "ks2 seed: fixed point (0,0,0)" in validate_key(k)


def test_divergent_henon_rejected():
    k = ChaosKey.from_values(REF[0], ["1.9", "1.9", "1.4", "0.3"], REF[2], 128)
    problems = validate_key(k)
    assert problems and "henon" in problems[0]


def test_short_cycle_rejected():
    # mu just inside the box still produces short periodic windows for some seeds;
    # build one by searching, then confirm the validator names the cycle
    rng = random.Random(5)
    for _ in range(2000):
        x0 = rng.uniform(0.05, 0.95)
        k = ChaosKey.from_values([f"{x0:.9f}", "3.83"], *REF[1:], 128)
        problems = validate_key(k)
        if problems:
            assert "repeats" in problems[0] or "cycle" in problems[0]
            return
    pytest.fail("no short-cycle key found in the period-3 window")


def test_degenerate_threshold_warns():
    k = ChaosKey.from_values(*REF, 0)
    with pytest.warns(DegenerateThresholdWarning):
        assert validate_key(k) == []


def test_keygen_seeded_and_random():
    assert keygen(random.Random(3)) == keygen(random.Random(3))
    a, b = keygen(), keygen()
    assert a != b
    assert validate_key(a) == [] and 1 <= a.threshold <= 254


def test_repr_hides_material(key):
    assert "0.3" not in repr(key) and "redacted" in repr(key)
    assert "redacted" in repr(key.kp)


def test_bit_flip_addresses_words_and_threshold(key):
    k0 = key.with_bit_flipped(0)
    assert k0.kp.x0.raw == key.kp.x0.raw ^ 1
    assert key.with_bit_flipped(32 + 31).kp.mu.raw < 0
    assert key.with_bit_flipped(KEY_BITS - 8).threshold == key.threshold ^ 1
    assert key.with_bit_flipped(200).with_bit_flipped(200) == key
    with pytest.raises(IndexError):
        key.with_bit_flipped(KEY_BITS)


def test_keyspace_exponent():
    assert keyspace_exponent(8, 13) == 104
    with pytest.raises(ValueError):
        keyspace_exponent(0, 13)


def test_equivalent_keys_from_symmetric_seed():
    """x0 and 1 - x0 start the same real orbit; in fixed point the two
    keystreams coincide for most keys.  This shrinks the effective keyspace
    and is recorded here rather than hidden."""
    rng = random.Random(4)
    same = 0
    for _ in range(100):
        k = keygen(rng)
        w = k.words()
        w[0] = (1 << 29) - w[0]
        twin = ChaosKey.from_words(w, k.threshold)
        same += k.logistic().take(64).tobytes() == twin.logistic().take(64).tobytes()
    assert same > 50


def test_low_seed_bits_can_collapse():
    """Truncating arithmetic merges neighbouring states early in the orbit,
    so flipping the lowest bit of a seed word often yields the same stream.
    Parameter words do not collapse this way."""
    rng = random.Random(1)
    ks = [keygen(rng) for _ in range(100)]
    seed_same = sum(k.logistic().take(64).tobytes()
                    == k.with_bit_flipped(0).logistic().take(64).tobytes() for k in ks)
    mu_same = sum(k.logistic().take(64).tobytes()
                  == k.with_bit_flipped(32).logistic().take(64).tobytes() for k in ks)
    assert seed_same > 0
    assert mu_same == 0


def test_generated_keystreams_pass_monobit():
    # 3000 streams: a per-stream alpha of 0.01 would fail ~30 ideal streams,
    # so the sanity bound is Bonferroni-corrected
    from chaoscomp.analysis.nist import bits_from_bytes, frequency
    rng = random.Random(11)
    worst = 1.0
    for _ in range(1000):
        k = keygen(rng)
        for gen in (k.logistic, k.henon, k.lorenz):
            worst = min(worst, frequency(bits_from_bytes(gen().take(10_000).tobytes())))
    assert worst > 0.01 / 3000
