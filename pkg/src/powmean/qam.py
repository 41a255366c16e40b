"""Quasi-arithmetic power means and their integrable relatives.

All estimators reduce along the last axis, so a ``(reps, n)`` matrix of
samples yields ``reps`` estimates in one call.  The public functions take a
single sample and wrap the result in :class:`EstimateResult`; the ``*_rows``
variants are the vectorised kernels used by the Monte Carlo harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from powmean.complex_core import (
    GeneratorSpec,
    as_complex,
    generator_eval,
    generator_inverse,
    principal_pow,
)
from powmean.errors import DomainError

__all__ = [
    "EstimateResult",
    "as_sample",
    "empirical_variance_proxy",
    "geometric_mean",
    "geometric_mean_rows",
    "qam_rows",
    "quasi_arithmetic_mean",
    "sums_of_products",
    "sums_of_products_rows",
    "truncated_power_mean",
    "truncated_rows",
    "truncation_residual_ratio",
]

HALF_PLANE_TOL = 1e-9

NONINTEGRABLE_WARNING = "p=-1 with real alpha: the mean is Cauchy distributed and not integrable"


@dataclass(frozen=True)
class EstimateResult:
    estimate: complex
    n: int
    generator: GeneratorSpec | None = None
    variance_proxy: float | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def mu(self) -> float:
        return self.estimate.real

    @property
    def sigma(self) -> float:
        return self.estimate.imag


def as_sample(values, min_size: int = 1) -> np.ndarray:
    """Validate a sample: a non-empty 1-d array of finite reals."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"sample must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_size:
        raise DomainError(f"sample needs at least {min_size} value(s), got {arr.size}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise DomainError(f"non-finite sample value at index {int(bad[0])}")
    return arr


def _check_poles(alpha: complex, x: np.ndarray) -> None:
    if alpha.imag != 0:
        return
    hits = np.flatnonzero((x + alpha.real).ravel() == 0)
    if hits.size:
        raise DomainError(f"sample value at index {int(hits[0])} equals -alpha (pole)")


def _half_plane_warnings(estimate: complex, warnings: list[str]) -> None:
    if estimate.imag < -HALF_PLANE_TOL:
        warnings.append(f"estimate left the closed upper half-plane (Im={estimate.imag:.3g})")


def _power_mean_scaled(g: GeneratorSpec, x: np.ndarray) -> np.ndarray:
    # (y/c)^p = y^p c^{-p} for real c > 0, so dividing by the row's largest |y|
    # leaves the mean unchanged while keeping tiny or huge samples in range
    y = as_complex(x + g.alpha)
    c = np.abs(y).max(axis=-1, keepdims=True)
    c = np.where(c > 0, c, 1.0)
    u = y.real / c + 1j * (y.imag / c)  # complex-by-real division overflows for subnormal c
    fu = np.asarray(principal_pow(u, g.p))
    w = fu.real.mean(axis=-1) + 1j * fu.imag.mean(axis=-1)  # an infinite real part stays inf+0j
    unit = GeneratorSpec(g.p, 0)
    return c[..., 0] * np.asarray(generator_inverse(unit, w)) - g.alpha


def qam_rows(g: GeneratorSpec, x) -> np.ndarray:
    """Quasi-arithmetic mean along the last axis."""
    x = np.asarray(x, dtype=float)
    if g.p <= 0:
        _check_poles(g.alpha, x)
    if g.p == 0:
        return generator_inverse(g, np.asarray(generator_eval(g, x)).mean(axis=-1))
    return _power_mean_scaled(g, x)


def quasi_arithmetic_mean(g: GeneratorSpec, s) -> EstimateResult:
    """``f^{-1}(mean f(x_j))`` for the generator ``g``.

    A real shift with ``p = -1`` is accepted but flagged in ``warnings``.
    """
    x = as_sample(s)
    if g.p <= 0:
        _check_poles(g.alpha, x)
    fx = generator_eval(g, x)
    est = complex(qam_rows(g, x))
    warnings: list[str] = []
    if g.nonintegrable:
        warnings.append(NONINTEGRABLE_WARNING)
    _half_plane_warnings(est, warnings)
    return EstimateResult(est, x.size, g, _variance_of(fx), tuple(warnings))


def geometric_mean_rows(alpha: complex, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    alpha = complex(alpha)
    _check_poles(alpha, x)
    logs = np.log(as_complex(x + alpha))
    return np.exp(logs.mean(axis=-1)) - alpha


def geometric_mean(alpha: complex, s) -> EstimateResult:
    """Shifted geometric mean ``prod (x_j + alpha) ** (1/n) - alpha``, evaluated in log space."""
    g = GeneratorSpec(0.0, alpha)
    x = as_sample(s)
    est = complex(geometric_mean_rows(g.alpha, x))
    warnings: list[str] = []
    _half_plane_warnings(est, warnings)
    return EstimateResult(est, x.size, g, None, tuple(warnings))


def truncated_rows(p: float, alpha: complex, x) -> np.ndarray:
    """Truncated positive power mean ``(n^{1/p} M_p - n M_1) / (n^{1/p} - n)`` along the last axis.

    With ``Y = x + alpha`` the statistic equals
    ``(S_p^{1/p} - S_1) / (n^{1/p} - n) - alpha``; both terms are scaled by
    ``n^{-1/p}`` so that small ``p`` neither overflows nor cancels.
    """
    if not 0 < p < 1:
        raise DomainError(f"truncated power mean needs 0 < p < 1, got {p}")
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if n < 2:
        raise DomainError("truncated power mean needs n >= 2 (n^{1/p} - n vanishes at n = 1)")
    alpha = complex(alpha)
    y = as_complex(x + alpha)
    power_mean = np.exp(np.log(principal_pow(y, p).mean(axis=-1)) / p)
    log_n = math.log(n)
    shrink = math.exp(-log_n / p)  # n^{-1/p}
    gap = -math.expm1((1.0 - 1.0 / p) * log_n)  # 1 - n^{1 - 1/p}
    return (power_mean - y.sum(axis=-1) * shrink) / gap - alpha


def truncated_power_mean(p: float, alpha: complex, s) -> EstimateResult:
    x = as_sample(s)
    if x.size < 2:
        raise DomainError("truncated power mean needs n >= 2 (n^{1/p} - n vanishes at n = 1)")
    g = GeneratorSpec(p, alpha)
    est = complex(truncated_rows(p, g.alpha, x))
    warnings: list[str] = []
    _half_plane_warnings(est, warnings)
    return EstimateResult(est, x.size, g, None, tuple(warnings))


def sums_of_products_rows(m: int, alpha: complex, x) -> np.ndarray:
    """Average over all ``m``-subsets of the shifted geometric products, along the last axis.

    Runs the elementary symmetric polynomial recurrence on the normalised
    quantities ``A_k = e_k / C(j, k)``:
    ``A_k <- (1 - k/j) A_k + (k/j) y_j A_{k-1}``.
    Dividing by the binomial inside the loop keeps magnitudes bounded.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if m < 1:
        raise DomainError(f"subset size m must be >= 1, got {m}")
    if n < m:
        raise DomainError(f"sums of products need n >= m, got n={n}, m={m}")
    alpha = complex(alpha)
    _check_poles(alpha, x)
    roots = principal_pow(as_complex(x + alpha), 1.0 / m)
    batch = roots.shape[:-1]
    acc = np.zeros(batch + (m + 1,), dtype=np.complex128)
    acc[..., 0] = 1.0
    ks = np.arange(1, m + 1)
    for j in range(1, n + 1):
        kk = ks[: min(j, m)]
        w = kk / j
        y = roots[..., j - 1 : j]
        acc[..., kk] = (1.0 - w) * acc[..., kk] + w * y * acc[..., kk - 1]
    return acc[..., m] - alpha


def sums_of_products(m: int, alpha: complex, s) -> EstimateResult:
    x = as_sample(s)
    g = GeneratorSpec(1.0 / m if m >= 1 else 1.0, alpha)
    est = complex(sums_of_products_rows(m, g.alpha, x))
    warnings: list[str] = []
    _half_plane_warnings(est, warnings)
    return EstimateResult(est, x.size, g, None, tuple(warnings))


def _variance_of(fx: np.ndarray) -> float:
    if np.all(fx == fx.flat[0]):
        return 0.0  # exact for constant samples; the mean may round in the last bit
    centred = fx - fx.mean()
    scale = float(np.max(np.abs(centred)))
    if not np.isfinite(scale):
        return math.inf
    u = centred / scale
    return float(scale * scale * np.mean(u.real**2 + u.imag**2))


def empirical_variance_proxy(g: GeneratorSpec, s) -> float:
    """``mean |f(x_j)|^2 - |mean f(x_j)|^2``, computed in centred (two-pass) form."""
    x = as_sample(s)
    if g.p <= 0:
        _check_poles(g.alpha, x)
    return _variance_of(np.asarray(generator_eval(g, x)))


def truncation_residual_ratio(p: float, x: complex, y: complex) -> float:
    """``|(x^p + y^p)^{1/p} - (x + y)| / max(|x|^p |y|^{1-p}, |x|^{1-p} |y|^p)``.

    Zero when either argument vanishes.
    """
    if not 0 < p < 1:
        raise DomainError(f"residual ratio needs 0 < p < 1, got {p}")
    x, y = complex(x), complex(y)
    if x == 0 or y == 0:
        return 0.0
    inner = complex(principal_pow(x, p)) + complex(principal_pow(y, p))
    s = complex(np.exp(np.log(as_complex(inner)) / p)) if inner != 0 else 0j
    ax, ay = abs(x), abs(y)
    scale = max(ax**p * ay ** (1 - p), ax ** (1 - p) * ay**p)
    return abs(s - (x + y)) / scale
