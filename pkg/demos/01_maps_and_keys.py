"""
Chaotic maps and keys
=====================

A key holds the seeds and parameters of three fixed-point chaotic maps plus
a threshold byte.  Each map turns into a byte keystream.
"""
import random

import numpy as np

from chaoscomp import chaos, keys

# a reproducible key; use keys.keygen() with no argument for a real one
key = keys.keygen(random.Random(1))
print(key)                      # key material is never printed
print("key file size:", len(keys.serialize_key(key)), "bytes")

# three keystreams, first 16 bytes each
for name, gen in (("logistic", key.logistic), ("henon", key.henon), ("lorenz", key.lorenz)):
    print(f"{name:>8}:", gen().take(16).tobytes().hex(" "))

# the keystreams look uniform
stream = key.henon().take(1 << 16)
counts = np.bincount(stream, minlength=256)
print("henon byte counts: min", counts.min(), "max", counts.max(), "expected", (1 << 16) // 256)

# %%
# Floating-point characterization of the underlying maps
for name in ("logistic", "tent", "henon", "lorenz"):
    m = chaos.CharacterizationMap.reference(name)
    print(f"Lyapunov exponent of {name:>8}: {chaos.lyapunov_exponent(m):.4f}")

# period doubling on the way to chaos; at mu = 3.0 itself the orbit
# converges too slowly for the samples to cluster
scan = chaos.bifurcation_scan(chaos.CharacterizationMap("logistic"), 2.8, 3.6, 9, 256)
for mu, values in scan:
    print(f"mu = {mu:.1f}: {chaos.count_attractor_points(values):>3} attractor points")

# %%
# Keyspace: 13 components at about 10**8 resolution each
print("keyspace: 10 **", keys.keyspace_exponent(8, 13))
