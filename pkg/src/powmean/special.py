"""Real gamma function via the Lanczos approximation (g = 7, nine coefficients)."""

from __future__ import annotations

import math

__all__ = ["gamma", "lgamma"]

_G = 7.0
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _series(z: float) -> float:
    acc = _COEFFS[0]
    for i, c in enumerate(_COEFFS[1:], start=1):
        acc += c / (z + i)
    return acc


def gamma(x: float) -> float:
    """Gamma function for real ``x`` that is not a non-positive integer."""
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    t = z + _G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _series(z)


def lgamma(x: float) -> float:
    """``log |Gamma(x)|`` for ``x > 0``."""
    if x <= 0:
        raise ValueError("lgamma is only implemented for positive arguments")
    if x < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * x))) - lgamma(1.0 - x)
    z = x - 1.0
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_series(z))
