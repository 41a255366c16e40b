"""Principal-branch complex arithmetic and the shifted power generators.

The generator family is ``f(x) = (x + alpha) ** p`` for ``p != 0`` and
``f(x) = log(x + alpha)`` for ``p == 0``, with ``alpha`` in the closed upper
half-plane.  Every function accepts scalars or numpy arrays; scalar input
gives a Python ``complex`` back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from powmean.errors import DomainError

__all__ = [
    "GeneratorSpec",
    "as_complex",
    "generator_derivative",
    "generator_eval",
    "generator_inverse",
    "principal_log",
    "principal_pow",
]


def _out(value, scalar: bool):
    return complex(value) if scalar else value


def as_complex(z) -> np.ndarray:
    """Return ``z`` as a complex array with negative zeros in the imaginary part cleared.

    numpy puts ``log(-1 - 0j)`` at ``-i*pi``; the principal branch used here
    sends every negative real to ``+i*pi``, so ``-0.0`` is normalised first.
    """
    arr = np.asarray(z)
    out = np.empty(arr.shape, dtype=np.complex128)
    out.real = np.real(arr)
    out.imag = np.imag(arr) + 0.0
    return out


def _first_zero(z: np.ndarray) -> int | None:
    hits = np.flatnonzero(z.ravel() == 0)
    return int(hits[0]) if hits.size else None


def principal_log(z):
    """``log|z| + i arg z`` with ``arg z`` in ``(-pi, pi]``.

    >>> principal_log(-1)
    3.141592653589793j
    """
    scalar = np.ndim(z) == 0
    zc = as_complex(z)
    idx = _first_zero(zc)
    if idx is not None:
        raise DomainError(f"log of zero (element {idx})")
    return _out(np.log(zc), scalar)


def principal_pow(z, p: float):
    """``exp(p * log z)`` on the principal branch; ``0 ** p = 0`` for ``0 < p <= 1``."""
    scalar = np.ndim(z) == 0
    zc = as_complex(z)
    if p == 1:
        return _out(zc, scalar)
    zero = zc == 0
    if np.any(zero):
        if not 0 < p <= 1:
            raise DomainError(f"0 ** {p} is undefined (element {_first_zero(zc)})")
        safe = np.where(zero, 1.0, zc)
        res = np.where(zero, 0.0, np.exp(p * np.log(safe)))
        return _out(res, scalar)
    if p == -1:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            res = 1.0 / zc
            # real inputs overflow to inf rather than inf+nan*i
            res = np.where(zc.imag == 0, (1.0 / zc.real) + 0j, res)
        return _out(res, scalar)
    return _out(np.exp(p * np.log(zc)), scalar)


@dataclass(frozen=True)
class GeneratorSpec:
    """Exponent ``p`` in ``[-1, 1]`` and shift ``alpha`` with ``Im(alpha) >= 0``."""

    p: float
    alpha: complex = 0j

    def __post_init__(self):
        p = float(self.p)
        alpha = complex(self.alpha)
        if not math.isfinite(p) or not -1.0 <= p <= 1.0:
            raise DomainError(f"exponent p={self.p} outside [-1, 1]")
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise DomainError(f"shift alpha={self.alpha} is not finite")
        if alpha.imag < 0:
            raise DomainError(f"shift alpha={self.alpha} lies in the lower half-plane")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "alpha", complex(alpha.real, alpha.imag + 0.0))

    @property
    def kind(self) -> str:
        return "log" if self.p == 0 else "power"

    @property
    def real_shift(self) -> bool:
        return self.alpha.imag == 0

    @property
    def nonintegrable(self) -> bool:
        """True for ``p = -1`` with a real shift: the mean is then Cauchy again."""
        return self.p == -1 and self.real_shift

    def __call__(self, x):
        return generator_eval(self, x)


def _shifted(g: GeneratorSpec, z) -> np.ndarray:
    return as_complex(np.asarray(z) + g.alpha)


def generator_eval(g: GeneratorSpec, x):
    """Evaluate ``f(x)``; raises :class:`DomainError` at the pole ``x = -alpha``."""
    scalar = np.ndim(x) == 0
    y = _shifted(g, x)
    if g.p <= 0:
        idx = _first_zero(y)
        if idx is not None:
            raise DomainError(f"pole of the generator at element {idx} (x = -alpha)")
    if g.p == 0:
        return _out(np.log(y), scalar)
    return principal_pow(y, g.p)


def generator_inverse(g: GeneratorSpec, w):
    """Map a generator value back: ``w ** (1/p) - alpha`` or ``exp(w) - alpha``.

    Image membership of ``w`` is not checked.
    """
    scalar = np.ndim(w) == 0
    wc = as_complex(w)
    if g.p == 0:
        return _out(np.exp(wc) - g.alpha, scalar)
    if g.p < 0:
        idx = _first_zero(wc)
        if idx is not None:
            raise DomainError(f"inverse of a negative power at w = 0 (element {idx})")
    if g.p == 1:
        res = wc - g.alpha
    elif g.p == -1:
        res = 1.0 / wc - g.alpha
    else:
        zero = wc == 0
        safe = np.where(zero, 1.0, wc)
        res = np.where(zero, 0.0, np.exp(np.log(safe) / g.p)) - g.alpha
    return _out(res, scalar)


def generator_derivative(g: GeneratorSpec, z):
    """``p (z + alpha) ** (p - 1)``, or ``1 / (z + alpha)`` for the log generator."""
    scalar = np.ndim(z) == 0
    y = _shifted(g, z)
    if g.p == 1:
        return _out(np.ones_like(y), scalar)
    idx = _first_zero(y)
    if idx is not None:
        raise DomainError(f"derivative evaluated at the pole (element {idx})")
    if g.p == 0:
        return _out(1.0 / y, scalar)
    return _out(g.p * np.exp((g.p - 1.0) * np.log(y)), scalar)
