"""Two-component mixture Cauchy model and its closed-form fractional-moment estimator.

With ``a_j = gamma_j ** alpha`` and ``B_k = E[X ** (k alpha)]`` the moments
satisfy ``(1 - t) a_1**k + t a_2**k = B_k``, so ``a_1, a_2`` are the roots of
``z**2 - S z + P`` with

    S = (B3 - B1 B2) / (B2 - B1**2),    P = (B1 B3 - B2**2) / (B2 - B1**2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from powmean.cauchy import ComplexParam, _param, _rng
from powmean.complex_core import as_complex, principal_pow
from powmean.errors import DomainError, RegimeError
from powmean.qam import as_sample

__all__ = [
    "MixtureEstimate",
    "MixtureParams",
    "MomentTriple",
    "estimate_mixture",
    "estimate_mixture_rows",
    "fractional_moment_vector",
    "fractional_moment_rows",
    "hausdorff_pair_distance",
    "population_moments",
    "root_sum_product",
    "sample_mixture",
    "solve_mixture",
]

DEFAULT_ALPHA_EXP = 0.1
BRANCH_TOL = 1e-8
DEGENERACY_TOL = 1e-12
T_EPS = 1e-12


def _check_alpha_exp(alpha_exp: float) -> float:
    alpha_exp = float(alpha_exp)
    if not 0 < alpha_exp < 1.0 / 6.0:
        raise DomainError(f"fractional exponent must lie in (0, 1/6), got {alpha_exp}")
    return alpha_exp


@dataclass(frozen=True)
class MixtureParams:
    """Weight ``t`` of the second component and the two Cauchy parameters.

    Identical components are rejected unless ``allow_identical=True``; such a
    degenerate mixture can be sampled but not estimated.
    """

    t: float
    gamma1: ComplexParam
    gamma2: ComplexParam
    allow_identical: bool = field(default=False, kw_only=True, compare=False, repr=False)

    def __post_init__(self):
        if not 0 < self.t < 1:
            raise DomainError(f"mixture weight must lie in (0, 1), got {self.t}")
        g1, g2 = _param(self.gamma1), _param(self.gamma2)
        if g1 == g2 and not self.allow_identical:
            raise DomainError("mixture components must differ (pass allow_identical=True for a degenerate mixture)")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "gamma1", g1)
        object.__setattr__(self, "gamma2", g2)

    @classmethod
    def from_tuple(cls, t: float, mu1: float, sigma1: float, mu2: float, sigma2: float):
        return cls(t, ComplexParam(mu1, sigma1), ComplexParam(mu2, sigma2))

    def roots(self, alpha_exp: float = DEFAULT_ALPHA_EXP) -> tuple[complex, complex]:
        """``(gamma1 ** alpha, gamma2 ** alpha)``."""
        return (
            complex(principal_pow(self.gamma1.value, alpha_exp)),
            complex(principal_pow(self.gamma2.value, alpha_exp)),
        )

    def swapped(self) -> MixtureParams:
        return MixtureParams(1.0 - self.t, self.gamma2, self.gamma1, allow_identical=self.allow_identical)


@dataclass(frozen=True)
class MomentTriple:
    B1: complex
    B2: complex
    B3: complex
    alpha_exp: float = DEFAULT_ALPHA_EXP

    def __post_init__(self):
        object.__setattr__(self, "alpha_exp", _check_alpha_exp(self.alpha_exp))

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.B1, self.B2, self.B3)


@dataclass(frozen=True)
class MixtureEstimate:
    a1: complex
    a2: complex
    gamma1_hat: complex
    gamma2_hat: complex
    t_hat: float
    t_imag: float
    branch: str
    low_quality: bool = False

    def swapped(self) -> MixtureEstimate:
        return MixtureEstimate(
            self.a2, self.a1, self.gamma2_hat, self.gamma1_hat,
            1.0 - self.t_hat, -self.t_imag, self.branch, self.low_quality,
        )

    def canonical(self) -> MixtureEstimate:
        """The labelling with ``t_hat <= 1/2``."""
        return self if self.t_hat <= 0.5 else self.swapped()


def sample_mixture(params: MixtureParams, n: int, rng=None) -> np.ndarray:
    """Pick component 2 with probability ``t`` (else component 1), then draw Cauchy."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = _rng(rng)
    second = rng.random(n) < params.t
    u = 1.0 - rng.random(n)
    z = np.tan(np.pi * (u - 0.5))
    mu = np.where(second, params.gamma2.mu, params.gamma1.mu)
    sigma = np.where(second, params.gamma2.sigma, params.gamma1.sigma)
    return mu + sigma * z


def fractional_moment_rows(x, alpha_exp: float):
    """Row means of ``x ** (k alpha)`` for ``k = 1, 2, 3`` (principal branch, ``0 ** a = 0``)."""
    alpha_exp = _check_alpha_exp(alpha_exp)
    x = np.asarray(x, dtype=float)
    absx = np.abs(x)
    logs = np.log(np.where(absx > 0, absx, 1.0))
    neg = x < 0
    out = []
    for k in (1, 2, 3):
        a = k * alpha_exp
        mag = np.where(absx > 0, np.exp(a * logs), 0.0)
        phase = np.where(neg, np.exp(1j * np.pi * a), 1.0)
        out.append((mag * phase).mean(axis=-1))
    return tuple(out)


def fractional_moment_vector(s, alpha_exp: float = DEFAULT_ALPHA_EXP) -> MomentTriple:
    """Empirical ``(mean x^a, mean x^{2a}, mean x^{3a})``."""
    x = as_sample(s)
    b1, b2, b3 = fractional_moment_rows(x, alpha_exp)
    return MomentTriple(complex(b1), complex(b2), complex(b3), alpha_exp)


def population_moments(params: MixtureParams, alpha_exp: float = DEFAULT_ALPHA_EXP) -> MomentTriple:
    """``B_k = (1 - t) gamma1^{k alpha} + t gamma2^{k alpha}``."""
    alpha_exp = _check_alpha_exp(alpha_exp)
    t = params.t
    vals = [
        (1 - t) * complex(principal_pow(params.gamma1.value, k * alpha_exp))
        + t * complex(principal_pow(params.gamma2.value, k * alpha_exp))
        for k in (1, 2, 3)
    ]
    return MomentTriple(*vals, alpha_exp=alpha_exp)


def _centred(b1, b2, b3):
    """``(c, root2)`` with ``a_{1,2} = c +- sqrt(root2)``, ``c = S/2``, ``root2 = S^2/4 - P``.

    Works in coordinates centred at ``B1``: with ``m2 = B2 - B1^2`` and
    ``m3 = B3 - 3 B1 B2 + 2 B1^3`` the shifted roots ``d_j = a_j - B1`` satisfy
    ``d1 + d2 = m3 / m2`` and ``d1 d2 = -m2``.  This is the same ``S, P``
    system without the cancellation in ``S^2/4 - P`` when the roots are close.
    """
    b1, b2, b3 = (as_complex(b) for b in (b1, b2, b3))
    m2 = b2 - b1 * b1
    scale = np.maximum(np.abs(b2), np.abs(b1) ** 2)
    if np.any(np.abs(m2) <= DEGENERACY_TOL * np.maximum(scale, 1e-300)):
        raise RegimeError("components indistinguishable: B2 - B1^2 vanishes")
    m3 = b3 - b1 * (3.0 * b2 - 2.0 * b1 * b1)
    half = 0.5 * m3 / m2
    return b1 + half, half * half + m2, half


def root_sum_product(B: MomentTriple) -> tuple[complex, complex]:
    """``S = a1 + a2`` and ``P = a1 a2`` as used by :func:`solve_mixture`.

    Algebraically ``S = (B3 - B1 B2) / (B2 - B1^2)`` and
    ``P = (B1 B3 - B2^2) / (B2 - B1^2)``.
    """
    c, root2, _ = _centred(B.B1, B.B2, B.B3)
    return complex(2.0 * c), complex(c * c - root2)


def _solve_arrays(b1, b2, b3):
    """Root pair of ``z^2 - S z + P`` from the moments, with the ratio fallback.

    Returns ``(a1, a2, t, ratio_mask)`` with the complex weight
    ``t = (a1 - B1) / (a1 - a2) = d1 / (d1 - d2)``.  Where ``Re(a1 - a2)`` is
    negligible next to ``|a1 - a2|``, ``(a1 - a2)^2`` sits on the branch cut of
    the square root and the ratio route is used instead:
    ``r + 1/r = S^2/P - 2`` for ``r = a1/a2`` and ``a1 = S / (1 + 1/r)``.
    """
    c, root2, half = _centred(b1, b2, b3)
    b1 = as_complex(b1)
    root = np.sqrt(as_complex(root2))  # (a1 - a2) / 2
    a1 = c + root
    a2 = c - root
    t = (half + root) / (2.0 * root)
    ratio = np.abs(root.real) < BRANCH_TOL * np.abs(root)
    if np.any(ratio):
        s = 2.0 * c
        p = c * c - root2
        f5 = s * s / p - 2.0
        f6 = f5 * f5 - 4.0
        r = (f5 + np.sqrt(as_complex(f6))) / 2.0
        ra1 = s / (1.0 + 1.0 / r)
        ra2 = s - ra1
        a1 = np.where(ratio, ra1, a1)
        a2 = np.where(ratio, ra2, a2)
        t = np.where(ratio, (ra1 - b1) / (ra1 - ra2), t)
    return a1, a2, t, ratio


def _finish(a1: complex, a2: complex, t_c: complex, alpha_exp: float, ratio: bool) -> MixtureEstimate:
    low = not -0.25 < t_c.real < 1.25
    t_hat = min(max(t_c.real, T_EPS), 1.0 - T_EPS)
    inv = 1.0 / alpha_exp
    g1 = complex(principal_pow(a1, inv)) if a1 != 0 else 0j
    g2 = complex(principal_pow(a2, inv)) if a2 != 0 else 0j
    return MixtureEstimate(a1, a2, g1, g2, t_hat, t_c.imag, "ratio" if ratio else "direct", low)


def solve_mixture(B: MomentTriple) -> MixtureEstimate:
    """Recover ``(a1, a2, t)`` and ``gamma_j = a_j ** (1/alpha)`` from three moments.

    ``t_hat`` is the real part of ``(a1 - B1) / (a1 - a2)`` clipped into
    ``(0, 1)``; the discarded imaginary part is kept in ``t_imag``.
    """
    a1, a2, t_c, ratio = _solve_arrays(B.B1, B.B2, B.B3)
    return _finish(complex(a1), complex(a2), complex(t_c), B.alpha_exp, bool(ratio))


def estimate_mixture(s, alpha_exp: float = DEFAULT_ALPHA_EXP) -> MixtureEstimate:
    x = as_sample(s)
    if x.size < 3:
        raise DomainError(f"mixture estimation needs n >= 3, got {x.size}")
    return solve_mixture(fractional_moment_vector(x, alpha_exp))


def estimate_mixture_rows(x, alpha_exp: float = DEFAULT_ALPHA_EXP):
    """Root estimates ``(a1_hat, a2_hat)`` for every row of ``x``."""
    b1, b2, b3 = fractional_moment_rows(x, alpha_exp)
    a1, a2, _, _ = _solve_arrays(b1, b2, b3)
    return a1, a2


def hausdorff_pair_distance(A, C) -> float:
    """``max(min(|a-c|, |a-d|), min(|b-c|, |b-d|))`` for ``A = (a, b)``, ``C = (c, d)``.

    Directed: only points of ``A`` are matched against ``C``.
    """
    a, b = A
    c, d = C
    return float(max(min(abs(a - c), abs(a - d)), min(abs(b - c), abs(b - d))))


def hausdorff_rows(a1, a2, c: complex, d: complex) -> np.ndarray:
    first = np.minimum(np.abs(a1 - c), np.abs(a1 - d))
    second = np.minimum(np.abs(a2 - c), np.abs(a2 - d))
    return np.maximum(first, second)


def pair_error(estimate: MixtureEstimate, params: MixtureParams, alpha_exp: float) -> float:
    return hausdorff_pair_distance((estimate.a1, estimate.a2), params.roots(alpha_exp))
