"""Compiled LZSS parse, Huffman bit packing and decoding for the baseline codec.

Literal/length and distance symbols follow the deflate alphabets: literals
0..255, end-of-block 256, length codes 257..285 and distance codes 0..29,
each with the usual extra bits.  Codes and extra bits are packed
most-significant-bit first.
"""
import numpy as np
from numba import njit

WSIZE = 1 << 15
WMASK = WSIZE - 1
HASH_BITS = 15
MIN_MATCH = 4
MAX_MATCH = 258
CHAIN_LIMIT = 128
EOB = 256
N_LITLEN = 286
N_DIST = 30
MAX_BITS = 15

LEN_BASE = np.array([3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31, 35, 43,
                     51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258], dtype=np.int64)
LEN_EXTRA = np.array([0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3,
                      4, 4, 4, 4, 5, 5, 5, 5, 0], dtype=np.int64)
DIST_BASE = np.array([1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193,
                      257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097, 6145,
                      8193, 12289, 16385, 24577], dtype=np.int64)
DIST_EXTRA = np.array([0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8,
                       9, 9, 10, 10, 11, 11, 12, 12, 13, 13], dtype=np.int64)


def _code_table(base, limit):
    table = np.zeros(limit + 1, dtype=np.int64)
    for code, b in enumerate(base):
        table[b:] = code
    return table


LEN_CODE = _code_table(LEN_BASE, MAX_MATCH)
DIST_CODE = _code_table(DIST_BASE, WSIZE)

# decoder status codes
OK = 0
ERR_EOF = 1
ERR_SYMBOL = 2
ERR_DISTANCE = 3
ERR_OVERFLOW = 4
ERR_SHORT = 5


@njit(cache=True)
def _hash(data, pos):
    v = (data[pos] | (data[pos + 1] << 8) | (data[pos + 2] << 16)
         | (np.int64(data[pos + 3]) << 24))
    return ((v * 2654435761) & 0xFFFFFFFF) >> (32 - HASH_BITS)


@njit(cache=True)
def lz_parse(data, tok_len, tok_val):
    """Greedy LZSS parse.  Token i is a literal ``tok_val[i]`` when
    ``tok_len[i] == 0``, else a (length, distance) match.  Returns the count."""
    n = data.shape[0]
    head = np.full(1 << HASH_BITS, -1, dtype=np.int64)
    prev = np.full(WSIZE, -1, dtype=np.int64)
    nt = 0
    pos = 0
    while pos < n:
        best = 0
        best_dist = 0
        if pos + MIN_MATCH <= n:
            h = _hash(data, pos)
            cand = head[h]
            limit = min(MAX_MATCH, n - pos)
            chain = 0
            while cand >= 0 and pos - cand <= WSIZE and chain < CHAIN_LIMIT:
                if data[cand + best] == data[pos + best]:
                    k = 0
                    while k < limit and data[cand + k] == data[pos + k]:
                        k += 1
                    if k > best:
                        best = k
                        best_dist = pos - cand
                        if k == limit:
                            break
                nxt = prev[cand & WMASK]
                if nxt >= cand:
                    break
                cand = nxt
                chain += 1
            prev[pos & WMASK] = head[h]
            head[h] = pos
        if best >= MIN_MATCH:
            tok_len[nt] = best
            tok_val[nt] = best_dist
            nt += 1
            end = pos + best
            pos += 1
            while pos < end:
                if pos + MIN_MATCH <= n:
                    h = _hash(data, pos)
                    prev[pos & WMASK] = head[h]
                    head[h] = pos
                pos += 1
        else:
            tok_len[nt] = 0
            tok_val[nt] = data[pos]
            nt += 1
            pos += 1
    return nt


@njit(cache=True)
def symbol_counts(tok_len, tok_val, nt, len_code, dist_code):
    lit = np.zeros(N_LITLEN, dtype=np.int64)
    dist = np.zeros(N_DIST, dtype=np.int64)
    for i in range(nt):
        if tok_len[i] == 0:
            lit[tok_val[i]] += 1
        else:
            lit[257 + len_code[tok_len[i]]] += 1
            dist[dist_code[tok_val[i]]] += 1
    lit[EOB] += 1
    return lit, dist


@njit(cache=True)
def _put(out, bitpos, value, nbits):
    for k in range(nbits - 1, -1, -1):
        if (value >> k) & 1:
            out[bitpos >> 3] |= 0x80 >> (bitpos & 7)
        bitpos += 1
    return bitpos


@njit(cache=True)
def pack(tok_len, tok_val, nt, lit_code, lit_len, dist_code_words, dist_len,
         len_code, dist_code, out):
    """Write the token stream plus end-of-block; return the bit count."""
    bp = 0
    for i in range(nt):
        if tok_len[i] == 0:
            s = tok_val[i]
            bp = _put(out, bp, lit_code[s], lit_len[s])
        else:
            c = len_code[tok_len[i]]
            bp = _put(out, bp, lit_code[257 + c], lit_len[257 + c])
            bp = _put(out, bp, tok_len[i] - LEN_BASE[c], LEN_EXTRA[c])
            d = dist_code[tok_val[i]]
            bp = _put(out, bp, dist_code_words[d], dist_len[d])
            bp = _put(out, bp, tok_val[i] - DIST_BASE[d], DIST_EXTRA[d])
    bp = _put(out, bp, lit_code[EOB], lit_len[EOB])
    return bp


@njit(cache=True)
def _bits(src, start, nbits_total, bp, n):
    """Read ``n`` bits MSB-first; returns (value, new bp) or (-1, bp) at EOF."""
    if bp + n > nbits_total:
        return -1, bp
    v = 0
    for _ in range(n):
        p = start * 8 + bp
        v = (v << 1) | ((src[p >> 3] >> (7 - (p & 7))) & 1)
        bp += 1
    return v, bp


@njit(cache=True)
def _decode_sym(src, start, nbits_total, bp, counts, symbols):
    code = 0
    first = 0
    index = 0
    for length in range(1, MAX_BITS + 1):
        if bp >= nbits_total:
            return -1, bp
        p = start * 8 + bp
        code |= (src[p >> 3] >> (7 - (p & 7))) & 1
        bp += 1
        count = counts[length]
        if code - count < first:
            return symbols[index + code - first], bp
        index += count
        first += count
        first <<= 1
        code <<= 1
    return -2, bp


@njit(cache=True)
def unpack(src, start, lcounts, lsyms, dcounts, dsyms, out):
    """Decode a packed token stream into ``out`` (which has the exact
    original length).  Returns (status, bit offset of the failure)."""
    nbits_total = (src.shape[0] - start) * 8
    bp = 0
    o = 0
    n = out.shape[0]
    while True:
        at = bp
        s, bp = _decode_sym(src, start, nbits_total, bp, lcounts, lsyms)
        if s == -1:
            return ERR_EOF, at
        if s < 0:
            return ERR_SYMBOL, at
        if s < 256:
            if o >= n:
                return ERR_OVERFLOW, at
            out[o] = s
            o += 1
        elif s == EOB:
            if o != n:
                return ERR_SHORT, at
            return OK, bp
        else:
            c = s - 257
            if c >= 29:
                return ERR_SYMBOL, at
            e, bp = _bits(src, start, nbits_total, bp, LEN_EXTRA[c])
            if e < 0:
                return ERR_EOF, at
            length = LEN_BASE[c] + e
            d, bp = _decode_sym(src, start, nbits_total, bp, dcounts, dsyms)
            if d == -1:
                return ERR_EOF, at
            if d < 0 or d >= 30:
                return ERR_SYMBOL, at
            e, bp = _bits(src, start, nbits_total, bp, DIST_EXTRA[d])
            if e < 0:
                return ERR_EOF, at
            dist = DIST_BASE[d] + e
            if dist > o:
                return ERR_DISTANCE, at
            if o + length > n:
                return ERR_OVERFLOW, at
            for k in range(length):
                out[o] = out[o - dist]
                o += 1
