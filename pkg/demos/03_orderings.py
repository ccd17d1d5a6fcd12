"""
Where encryption sits relative to compression
=============================================

Permuting before compression keeps the byte statistics the compressor
needs, so the combined pipeline compresses about as well as compressing
first.  Encrypting first removes all redundancy.
"""
import random

from chaoscomp import corpus, keys
from chaoscomp.codec import CodecId, compress
from chaoscomp.pipeline import PipelineMode, encrypt

key = keys.keygen(random.Random(4))

for label, data in (("zipf", corpus.zipf_bytes(1_000_000, seed=4)),
                    ("text", corpus.text_corpus(1_000_000))):
    plain_ratio = len(data) / len(compress(data).payload)
    print(f"{label}: compression alone {plain_ratio:.3f}")
    for mode in PipelineMode:
        body = encrypt(data, key, CodecId.BASELINE, mode).body
        print(f"  {mode.name}: ratio {len(data) / len(body):.3f}")

# On text the shuffle breaks long matches, so SCE trails CTE there; on
# independent symbols (zipf) only the entropy coder matters and they agree.
