"""The Cauchy family in the complex parametrisation ``gamma = mu + i sigma``.

Sampling, density, three independent routes to the asymptotic variance
``V(p)`` of the shifted power mean, asymptotic confidence discs, the
maximum-likelihood fixed-point iteration, the influence function and the
inaccuracy rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from powmean.complex_core import (
    GeneratorSpec,
    as_complex,
    generator_derivative,
    generator_eval,
)
from powmean.errors import DomainError, RegimeError
from powmean.qam import as_sample, empirical_variance_proxy, qam_rows, quasi_arithmetic_mean
from powmean.quadrature import integrate_from_anchor, substitution_power
from powmean.special import gamma as gamma_fn

__all__ = [
    "ComplexParam",
    "ConfidenceDisc",
    "MLEResult",
    "asymptotic_variance_cos",
    "asymptotic_variance_gamma",
    "asymptotic_variance_quadrature",
    "cauchy_density",
    "cauchy_expectation",
    "confidence_disc",
    "disc_radius_factor",
    "fixed_point_map",
    "inaccuracy_rate",
    "influence_function",
    "l2_regime",
    "mle_fixed_point",
    "sample_cauchy",
]


@dataclass(frozen=True)
class ComplexParam:
    """Location ``mu`` and scale ``sigma > 0`` packed as ``gamma = mu + i sigma``."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise DomainError(f"non-finite Cauchy parameter ({self.mu}, {self.sigma})")
        if self.sigma <= 0:
            raise DomainError(f"Cauchy scale must be positive, got {self.sigma}")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma", float(self.sigma))

    @classmethod
    def from_complex(cls, gamma) -> ComplexParam:
        gamma = complex(gamma)
        return cls(gamma.real, gamma.imag)

    @property
    def value(self) -> complex:
        return complex(self.mu, self.sigma)


def _param(gamma) -> ComplexParam:
    return gamma if isinstance(gamma, ComplexParam) else ComplexParam.from_complex(gamma)


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_cauchy(gamma, n: int, rng=None) -> np.ndarray:
    """Draw ``n`` values by inverse CDF, ``mu + sigma tan(pi (U - 1/2))``."""
    gamma = _param(gamma)
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    u = 1.0 - _rng(rng).random(n)  # (0, 1]
    return gamma.mu + gamma.sigma * np.tan(np.pi * (u - 0.5))


def cauchy_density(gamma, x):
    gamma = _param(gamma)
    x = np.asarray(x, dtype=float)
    res = gamma.sigma / (np.pi * ((x - gamma.mu) ** 2 + gamma.sigma**2))
    return float(res) if res.ndim == 0 else res


def cauchy_expectation(kernel, gamma, alpha=0j, *, power: float = 0.0, log: bool = False,
                       rtol: float = 1e-12):
    """``E[kernel(X + alpha)]`` for ``X ~ Cauchy(gamma)``.

    ``kernel`` receives complex ``y = x + alpha`` arrays.  ``power`` is the
    exponent ``q`` with ``|kernel(y)| ~ |y|**q`` at ``y -> 0`` and
    ``|y| -> inf`` (``log`` adds a logarithmic factor); it only steers the
    endpoint substitutions.  Under ``x = mu + sigma tan(theta)`` the density
    becomes ``1/pi`` on ``(-pi/2, pi/2)``.  The interval is cut at the
    pole ``x = -alpha`` (real shifts) and every panel is integrated in the
    exact distance from its singular end.
    """
    gamma = _param(gamma)
    alpha = complex(alpha)
    mu, sigma = gamma.mu, gamma.sigma
    c = complex(mu + alpha.real, alpha.imag)
    half = 0.5 * math.pi

    tail_a = None if (log and power <= 0) else -power
    if tail_a is not None and tail_a <= -1:
        return math.inf
    k_tail = substitution_power(tail_a)

    def lower_tail(e):  # theta = -pi/2 + e
        return kernel(as_complex(c - sigma * np.cos(e) / np.sin(e)))

    def upper_tail(e):  # theta = pi/2 - e
        return kernel(as_complex(c + sigma * np.cos(e) / np.sin(e)))

    if alpha.imag != 0:
        split = math.atan2(-c.real, sigma)
        lo = integrate_from_anchor(lower_tail, split + half, k_tail, rtol=rtol)
        hi = integrate_from_anchor(upper_tail, half - split, k_tail, rtol=rtol)
        return (lo + hi) / math.pi

    pole_a = None if log else power
    if pole_a is not None and pole_a <= -1:
        return math.inf
    k_pole = substitution_power(pole_a if (pole_a is None or pole_a < 0) else 0.0)
    theta0 = math.atan2(-c.real, sigma)
    cos0 = math.cos(theta0)

    def left_of_pole(d):
        return kernel(as_complex(-sigma * np.sin(d) / (np.cos(theta0 - d) * cos0)))

    def right_of_pole(d):
        return kernel(as_complex(sigma * np.sin(d) / (np.cos(theta0 + d) * cos0)))

    mid_lo = 0.5 * (theta0 - half)
    mid_hi = 0.5 * (theta0 + half)
    parts = (
        integrate_from_anchor(lower_tail, mid_lo + half, k_tail, rtol=rtol),
        integrate_from_anchor(left_of_pole, theta0 - mid_lo, k_pole, rtol=rtol),
        integrate_from_anchor(right_of_pole, mid_hi - theta0, k_pole, rtol=rtol),
        integrate_from_anchor(upper_tail, half - mid_hi, k_tail, rtol=rtol),
    )
    return sum(parts) / math.pi


def _check_variance_regime(p: float, alpha: complex) -> None:
    if not -1.0 <= p <= 0.0:
        raise DomainError(f"asymptotic variance is implemented for p in [-1, 0], got {p}")
    if alpha.imag < 0:
        raise DomainError(f"shift alpha={alpha} lies in the lower half-plane")
    if alpha.imag == 0 and p <= -0.5:
        raise RegimeError(
            f"asymptotic variance diverges for p={p} <= -1/2 with a real shift alpha={alpha}"
        )


def asymptotic_variance_quadrature(p: float, alpha, gamma, *, rtol: float = 1e-12) -> float:
    """``V(p) = Var f(X) / |f'(gamma)|^2`` with the moments integrated numerically.

    For ``p < 0``::

        V(p) = (E|X + alpha|^{2p} - |gamma + alpha|^{2p}) / p^2 * |gamma + alpha|^{2(1-p)}

    evaluated as ``|gamma + alpha|^2 E[expm1(2p log(|X + alpha| / |gamma + alpha|))] / p^2``
    to avoid cancellation near ``p = 0``.  For ``p = 0`` it returns
    ``exp(2 E log|X + alpha|) Var(log(X + alpha))``.
    """
    alpha = complex(alpha)
    gamma = _param(gamma)
    p = float(p)
    _check_variance_regime(p, alpha)
    shift = gamma.value + alpha
    if p == 0:
        mean_log = cauchy_expectation(np.log, gamma, alpha, power=0.0, log=True, rtol=rtol)

        def centred_sq(y):
            d = np.log(y) - mean_log
            return d.real**2 + d.imag**2

        var_log = cauchy_expectation(centred_sq, gamma, alpha, power=0.0, log=True, rtol=rtol)
        return float(math.exp(2.0 * mean_log.real) * var_log)

    log_ref = math.log(abs(shift))

    def kernel(y):
        return np.expm1(2.0 * p * (np.log(np.abs(y)) - log_ref))

    # expm1(...) ~ |y|^{2p} at the pole and tends to -1 in the tails
    excess = cauchy_expectation(kernel, gamma, alpha, power=min(2.0 * p, 0.0), rtol=rtol)
    return float(abs(shift) ** 2 * excess / p**2)


def asymptotic_variance_cos(p: float, alpha: float, gamma) -> float:
    """Closed form for a real shift and ``-1/2 < p < 0``.

    ``V(p) = |gamma + alpha|^2 / p^2 (cos(p pi b) / cos(p pi) - 1)`` with
    ``b = 2 arg(gamma + alpha) / pi - 1``.  The bracket is rewritten as a
    product of sines, which keeps full precision as ``p -> 0``.
    """
    p = float(p)
    alpha = complex(alpha)
    if alpha.imag != 0:
        raise DomainError(f"cos form needs a real shift, got alpha={alpha}")
    if not -0.5 < p < 0:
        raise DomainError(f"cos form needs -1/2 < p < 0, got {p}")
    shift = _param(gamma).value + alpha.real
    b = 2.0 * math.atan2(shift.imag, shift.real) / math.pi - 1.0
    u, v = p * math.pi * b, p * math.pi
    bracket = -2.0 * math.sin(0.5 * (u + v)) * math.sin(0.5 * (u - v)) / math.cos(v)
    return abs(shift) ** 2 / p**2 * bracket


def asymptotic_variance_gamma(p: float) -> float:
    """Closed form for ``alpha = gamma = i`` and ``-1 <= p < 0``.

    ``V(p) = 4^{1-p} / p^2 (Gamma(1/2 - p) / (sqrt(pi) Gamma(1 - p)) - 4^p)``
    """
    p = float(p)
    if not -1.0 <= p < 0:
        raise DomainError(f"gamma form needs -1 <= p < 0, got {p}")
    ratio = gamma_fn(0.5 - p) / (math.sqrt(math.pi) * gamma_fn(1.0 - p))
    return 4.0 ** (1.0 - p) / p**2 * (ratio - 4.0**p)


def l2_regime(g: GeneratorSpec) -> bool:
    """Whether ``f(X)`` is square integrable for Cauchy data.

    ``|f(X)|^2 ~ |X + alpha|^{2p}``: a real shift needs ``2p > -1`` at the
    pole and every shift needs ``2p < 1`` in the tails.
    """
    if g.p >= 0.5:
        return False
    return not (g.real_shift and g.p <= -0.5)


@dataclass(frozen=True)
class ConfidenceDisc:
    center: complex
    radius: float
    level: float
    degenerate: bool = False

    def __contains__(self, z) -> bool:
        return abs(complex(z) - self.center) < self.radius


def disc_radius_factor(a: float) -> float:
    """``R_a`` with ``P(|Z| > R_a) = a`` for a standard bivariate normal ``Z``.

    ``|Z|^2`` is exponential with mean 2, so ``R_a = sqrt(-2 log a)``.
    The formula holds for any ``a`` in ``(0, 1)``.
    """
    if not 0 < a < 1:
        raise DomainError(f"disc level parameter a must lie in (0, 1), got {a}")
    return math.sqrt(-2.0 * math.log(a))


def confidence_disc(g: GeneratorSpec, s, a: float) -> ConfidenceDisc:
    """Asymptotic ``1 - a`` confidence disc for ``gamma`` around the power mean."""
    r_a = disc_radius_factor(a)
    if not l2_regime(g):
        raise RegimeError(f"f(X) is not square integrable for p={g.p}, alpha={g.alpha}")
    x = as_sample(s, min_size=2)
    center = quasi_arithmetic_mean(g, x).estimate
    v_n = empirical_variance_proxy(g, x)
    slope = abs(generator_derivative(g, center))
    radius = math.sqrt(v_n) * r_a / (math.sqrt(2.0 * x.size) * slope)
    return ConfidenceDisc(center, radius, 1.0 - a, degenerate=radius == 0)


def disc_rows(g: GeneratorSpec, x: np.ndarray, a: float):
    """Centres and radii of the confidence discs for each row of ``x``."""
    r_a = disc_radius_factor(a)
    fx = np.asarray(generator_eval(g, x))
    mean_f = fx.mean(axis=-1, keepdims=True)
    centred = fx - mean_f
    v_n = np.mean(centred.real**2 + centred.imag**2, axis=-1)
    center = qam_rows(g, x)
    slope = np.abs(generator_derivative(g, center))
    n = x.shape[-1]
    return center, np.sqrt(v_n) * r_a / (math.sqrt(2.0 * n) * slope)


def fixed_point_map(s, theta: complex) -> complex:
    """``Q(theta)``: the ``p = -1`` power mean with shift ``-conj(theta)``."""
    theta = complex(theta)
    g = GeneratorSpec(-1.0, -theta.conjugate())
    return complex(qam_rows(g, np.asarray(s, dtype=float)))


@dataclass(frozen=True)
class MLEResult:
    estimate: complex
    converged: bool
    iterations: int
    steps: tuple[float, ...] = field(default_factory=tuple)

    @property
    def residual(self) -> float:
        return self.steps[-1] if self.steps else math.inf


def mle_fixed_point(s, start: complex = 1j, tol: float = 1e-10, max_iter: int = 500) -> MLEResult:
    """Cauchy MLE of ``gamma`` as the limit of ``Y_m = Q(Y_{m-1})``.

    Returns the last iterate with ``converged=False`` when ``max_iter`` is
    exhausted; ``steps`` holds ``|Y_m - Y_{m-1}|`` for every iteration.
    """
    x = as_sample(s)
    if x.size < 3:
        raise RegimeError(f"the Cauchy MLE needs n >= 3 observations, got {x.size}")
    y = complex(start)
    if not y.imag > 0:
        raise DomainError(f"starting point must lie in the open upper half-plane, got {start}")
    steps: list[float] = []
    for it in range(1, max_iter + 1):
        nxt = fixed_point_map(x, y)
        step = abs(nxt - y)
        steps.append(step)
        y = nxt
        if step < tol:
            return MLEResult(y, True, it, tuple(steps))
    return MLEResult(y, False, max_iter, tuple(steps))


def influence_function(g: GeneratorSpec, gamma, x):
    """``(f(x) - f(gamma)) / f'(gamma)``."""
    gval = _param(gamma).value
    return (generator_eval(g, x) - generator_eval(g, gval)) / generator_derivative(g, gval)


def inaccuracy_rate(p: float, alpha, gamma) -> float:
    """``|f'(gamma)|^2 / Var f(X) = 1 / V(p)``."""
    return 1.0 / asymptotic_variance_quadrature(p, alpha, gamma)
