"""Chaos-map keyed permutation, compression and substitution pipeline.

Subpackages and modules:

    fxp       32-bit fixed-point words
    chaos     keystream generators and map characterization
    keys      key structure, validation and key files
    permute   keyed block shuffle
    codec     store / baseline LZSS+Huffman / optional zstd
    subst     chained Henon/Lorenz substitution
    pipeline  chunked encrypt/decrypt and the container format
    analysis  correlation, sensitivity and randomness tests
"""
from .codec import CodecId, CompressedChunk, compress, decompress
from .errors import *  # noqa: F401,F403
from .fxp import Fx32, fx_add, fx_low_byte, fx_mul, fx_neg, fx_sub
from .keys import ChaosKey, keygen, parse_key, serialize_key, validate_key
from .pipeline import PipelineMode, SceContainer, decrypt, encrypt

__version__ = "0.1.0"
