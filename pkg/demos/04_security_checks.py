"""
Security checks and their limits
================================

Correlation, sensitivity, the Chen property check and the randomness
tests, followed by the weaknesses the implementation exposes.
"""
import random

import numpy as np

from chaoscomp import analysis, corpus, keys
from chaoscomp.pipeline import encrypt

rng = random.Random(5)
key = keys.keygen(rng)
plain = corpus.random_bytes(1_000_000, 5)

print("plain/cipher cc:", f"{analysis.plain_cipher_correlation(plain, key):.2e}")
r = analysis.key_sensitivity(plain, key, 40)
print(f"flip key bit {r.bit}: cc {r.cc:.2e}, csi - baseline {r.csi_deviation:.2e}")
r = analysis.plaintext_sensitivity(plain, key, 12345)
print(f"flip plaintext bit {r.bit}: cc {r.cc:.2e}, csi - baseline {r.csi_deviation:.2e}")

print("Chen equalities, real pipeline:", analysis.chen_property_check(key, 20, seed=1), "/ 20")
print("Chen equalities, weak control:",
      analysis.chen_property_check(key, 20, cipher=analysis.weak_cipher, seed=1), "/ 20")

# %%
# Randomness tests on ciphertext of 10 samples of 10**6 bits
body = encrypt(corpus.random_bytes(10 * 125_000 + 1, 6), key).body
print(analysis.nist_campaign(body, samples=10, length=1_000_000).table())

# %%
# Equivalent keys.  Truncating fixed-point arithmetic merges nearby states,
# so the lowest bits of seed words frequently do not matter.
def stream(k):
    return k.logistic().take(64).tobytes() + k.henon().take(64).tobytes()

ks = [keys.keygen(rng) for _ in range(50)]
same = sum(stream(k) == stream(k.with_bit_flipped(0)) for k in ks)
print(f"flipping the lowest bit of the logistic seed changed nothing for {same}/50 keys")

# Modular chaining keeps the lowest set bit of a difference in place.
from chaoscomp.subst import SubstState, substitute

def sub(data):
    return np.frombuffer(substitute(data, SubstState(key.henon(), key.lorenz())), np.uint8)

d = corpus.random_bytes(1000, 7)
flipped = bytes([d[0] ^ 0x80]) + d[1:]
print("xor difference after a top-bit flip:", set((sub(d) ^ sub(flipped)).tolist()))
