"""Deterministic test corpora: random bytes, Zipf-distributed bytes, English text."""
from __future__ import annotations

import ast
import sysconfig
from pathlib import Path

import numpy as np


def random_bytes(n: int, seed: int | None = None) -> bytes:
    return np.random.default_rng(seed).bytes(n)


def zipf_bytes(n: int, seed: int | None = 0, exponent: float = 1.0) -> bytes:
    """I.i.d. bytes whose k-th most frequent value has probability ~ 1/k^s.

    Ranks are mapped to byte values through a fixed seeded permutation so
    the frequent values are not simply the small ones.
    """
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, 257) ** exponent
    values = rng.permutation(256).astype(np.uint8)
    return values[rng.choice(256, size=n, p=weights / weights.sum())].tobytes()


def _docstrings(path: Path):
    try:
        tree = ast.parse(path.read_text(encoding="utf-8"))
    except (SyntaxError, UnicodeDecodeError, ValueError):
        return
    for node in ast.walk(tree):
        if isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef, ast.AsyncFunctionDef)):
            doc = ast.get_docstring(node)
            if doc:
                yield doc


def text_corpus(n: int) -> bytes:
    """About ``n`` bytes of English prose taken from standard-library docstrings.

    Files are visited in sorted order, so the result is stable for a given
    Python installation; the text repeats if the library runs out.
    """
    root = Path(sysconfig.get_paths()["stdlib"])
    parts, size = [], 0
    for path in sorted(root.glob("*.py")):
        for doc in _docstrings(path):
            chunk = doc.encode("utf-8") + b"\n\n"
            parts.append(chunk)
            size += len(chunk)
            if size >= n:
                return b"".join(parts)[:n]
    if not parts:
        raise RuntimeError("no docstrings found in the standard library")
    text = b"".join(parts)
    return (text * (n // len(text) + 1))[:n]
