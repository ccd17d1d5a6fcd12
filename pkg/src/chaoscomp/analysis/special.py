"""Special functions used by the randomness tests.

``erfc`` is the C library's complementary error function (via ``math``) and
``igamc`` is the regularized upper incomplete gamma function Q(a, x) from
SciPy.  Both are accurate far beyond the 1e-10 the p-values need.
"""
from __future__ import annotations

import math

from scipy import special as _sp


def erfc(x: float) -> float:
    return math.erfc(x)


def igamc(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a) for a > 0, x >= 0."""
    if a <= 0:
        raise ValueError("igamc requires a > 0")
    if x < 0:
        raise ValueError("igamc requires x >= 0")
    return float(_sp.gammaincc(a, x))
