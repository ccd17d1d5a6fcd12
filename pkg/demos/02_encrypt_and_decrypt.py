"""
Encrypting a buffer and a stream
================================

The default pipeline shuffles 64-byte blocks, compresses each chunk and then
runs the compressed bytes through a chained substitution.
"""
import io
import random

from chaoscomp import corpus, keys
from chaoscomp.pipeline import decrypt, decrypt_stream, encrypt, encrypt_stream

key = keys.keygen(random.Random(2))
text = corpus.text_corpus(500_000)

container = encrypt(text, key, chunk_size=128 << 10)
print("chunks:", len(container.chunk_lengths), "lengths:", container.chunk_lengths)
print(f"{len(text)} plaintext bytes -> {len(container.body)} body bytes "
      f"(+{len(container.header_bytes())} header)")
assert decrypt(container, key) == text

# the header is public: it shows sizes, never key material
print("header:", container.header_bytes()[:23].hex(" "))

# %%
# Streams go chunk by chunk and never hold the whole input
src, dst = io.BytesIO(text), io.BytesIO()
encrypt_stream(src, dst, key, chunk_size=64 << 10)
back = io.BytesIO()
decrypt_stream(io.BytesIO(dst.getvalue()), back, key)
print("stream roundtrip ok:", back.getvalue() == text)

# %%
# A different key does not decrypt
other = keys.keygen(random.Random(3))
try:
    decrypt(container, other)
except Exception as exc:
    print("wrong key:", type(exc).__name__)
