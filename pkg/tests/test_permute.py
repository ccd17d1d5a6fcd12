import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaoscomp.permute import (deshuffle, deshuffle_block, permutation_indices, shuffle,
                               shuffle_block)


def test_block_is_permutation_and_inverts(key):
    data = bytes(range(64))
    out, pi = shuffle_block(data, key.logistic(), key.threshold)
    assert sorted(out) == list(data)
    assert bytes(data[i] for i in pi) == out
    assert deshuffle_block(out, key.logistic(), key.threshold) == data


def test_single_byte_block_is_unchanged(key):
    g = key.logistic()
    assert shuffle_block(b"\x2a", g, key.threshold)[0] == b"\x2a"


@pytest.mark.parametrize("n", [1, 2, 63, 64, 65, 127, 128, 1000])
def test_bulk_matches_blockwise_reference(key, n):
    data = np.random.default_rng(n).bytes(n)
    g_ref, g_bulk = key.logistic(), key.logistic()
    ref = b"".join(shuffle_block(data[i:i + 64], g_ref, key.threshold)[0]
                   for i in range(0, n, 64))
    assert shuffle(data, g_bulk, key.threshold) == ref
    assert g_ref.steps == g_bulk.steps


def test_consumption_is_data_independent(key):
    a, b = key.logistic(), key.logistic()
    shuffle(bytes(500), a, key.threshold)
    shuffle(np.random.default_rng(0).bytes(500), b, key.threshold)
    assert a.steps == b.steps


@pytest.mark.parametrize("T", [0, 255])
def test_extreme_thresholds(key, T):
    data = bytes(range(64))
    out = shuffle(data, key.logistic(), T)
    assert deshuffle(out, key.logistic(), T) == data


def test_threshold_255_skips_first_phase(key):
    # no byte exceeds 255, so the shuffle draws one byte per lower-half
    # position and then one per upper-half position
    g = key.logistic()
    start = g.steps
    shuffle_block(bytes(64), g, 255)
    assert g.steps - start == 64


def test_permutation_indices_form_a_permutation(key):
    idx = permutation_indices(1000, key.logistic(), key.threshold)
    assert sorted(idx.tolist()) == list(range(1000))
    # positions never leave their 64-byte block
    assert np.all(idx // 64 == np.arange(1000) // 64)


def test_lower_half_keeps_fixed_points(key):
    """Lower-half slots move only when the predicate fires, so a sizeable
    share of bytes stays in place; only the upper half is fully shuffled."""
    idx = permutation_indices(64 * 400, key.logistic(), key.threshold)
    fixed = (idx == np.arange(idx.size)).reshape(-1, 64)
    assert 0.1 < fixed[:, :32].mean() < 0.9
    assert fixed[:, 32:].mean() < 0.1


class _Stub:
    """Logistic-shaped generator that always emits the same byte."""
    kind = "logistic"

    def __init__(self, value):
        self.value, self.steps = value, 0

    def next_byte(self):
        self.steps += 1
        return self.value


def test_constant_keystream_replay():
    # byte 0xFF never exceeds T = 0xFF, so the first pass only advances srt;
    # the tail then swaps mid with mid + 255 % (64 - mid)
    pi = list(range(64))
    for mid in range(32, 64):
        pos = mid + 255 % (64 - mid)
        pi[mid], pi[pos] = pi[pos], pi[mid]
    out, trace = shuffle_block(bytes(range(64)), _Stub(0xFF), 0xFF)
    assert trace == pi and out == bytes(pi)


def test_identical_bytes_unchanged(key):
    assert shuffle(b"\x07" * 64, key.logistic(), key.threshold) == b"\x07" * 64


def test_histogram_preserved(key):
    data = np.random.default_rng(9).bytes(10_000)
    out = shuffle(data, key.logistic(), key.threshold)
    assert np.array_equal(np.bincount(np.frombuffer(out, np.uint8), minlength=256),
                          np.bincount(np.frombuffer(data, np.uint8), minlength=256))


def test_requires_logistic_generator(key):
    with pytest.raises(TypeError):
        shuffle(b"abc", key.henon(), 10)


@settings(max_examples=60, deadline=None)
@given(st.binary(min_size=0, max_size=700), st.integers(0, 255))
def test_roundtrip_property(key, data, T):
    assert deshuffle(shuffle(data, key.logistic(), T), key.logistic(), T) == data
