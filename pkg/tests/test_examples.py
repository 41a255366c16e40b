"""Hand-computed reference values for each public operation."""

import cmath
import math

import numpy as np
import pytest

from powmean.cauchy import (
    asymptotic_variance_cos,
    asymptotic_variance_gamma,
    asymptotic_variance_quadrature,
    cauchy_density,
    inaccuracy_rate,
    influence_function,
    mle_fixed_point,
    sample_cauchy,
)
from powmean.complex_core import (
    GeneratorSpec,
    generator_derivative,
    generator_eval,
    generator_inverse,
    principal_log,
    principal_pow,
)
from powmean.errors import DomainError
from powmean.mixture import MixtureParams, hausdorff_pair_distance, population_moments, solve_mixture
from powmean.montecarlo import TrialSummary
from powmean.qam import (
    empirical_variance_proxy,
    geometric_mean,
    quasi_arithmetic_mean,
    sums_of_products,
    truncated_power_mean,
    truncation_residual_ratio,
)

PI = math.pi


@pytest.mark.parametrize("z,expected", [(1, 0), (-1, 1j * PI), (1j, 1j * PI / 2)])
def test_principal_log(z, expected):
    assert complex(principal_log(z)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("z,p,expected", [(4, 0.5, 2), (-1, 0.5, 1j), (1j, -1, -1j)])
def test_principal_pow(z, p, expected):
    assert complex(principal_pow(z, p)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("p,alpha,x,expected", [
    (-1, 1j, 1, (1 - 1j) / 2),
    (1, 0, 3, 3),
    (0, 0, -1, 1j * PI),
])
def test_generator_eval(p, alpha, x, expected):
    assert complex(generator_eval(GeneratorSpec(p, alpha), x)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("p,alpha,w,expected", [
    (-1, 1j, -0.5j, 1j),
    (1, 0, 5, 5),
    (0, 0, 1j * PI / 2, 1j),
])
def test_generator_inverse(p, alpha, w, expected):
    assert complex(generator_inverse(GeneratorSpec(p, alpha), w)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("p,alpha,z,expected", [
    (-1, 0, 2, -0.25),
    (1, 1j, 3 + 2j, 1),
    (0.5, 0, 4, 0.25),
])
def test_generator_derivative(p, alpha, z, expected):
    assert complex(generator_derivative(GeneratorSpec(p, alpha), z)) == pytest.approx(expected, abs=1e-15)


def test_power_mean_values():
    assert quasi_arithmetic_mean(GeneratorSpec(-1, 1j), [1, -1]).estimate == pytest.approx(1j, abs=1e-15)
    assert quasi_arithmetic_mean(GeneratorSpec(0, 0), [1, 4]).estimate == pytest.approx(2, abs=1e-15)


def test_geometric_mean_values():
    assert geometric_mean(0, [1, 4]).estimate == pytest.approx(2, abs=1e-15)
    assert geometric_mean(0, [-1, 1]).estimate == pytest.approx(1j, abs=1e-15)
    assert geometric_mean(0, [3.5, 3.5]).estimate == pytest.approx(3.5, rel=1e-15)


def test_truncated_values():
    assert truncated_power_mean(0.5, 0, [1, 4]).estimate == pytest.approx(2, abs=1e-14)
    assert abs(truncated_power_mean(1e-3, 0, [1, 4]).estimate - 2) < 1e-2
    assert truncated_power_mean(0.3, 1j, [2.5] * 6).estimate == pytest.approx(2.5, rel=1e-10)
    with pytest.raises(DomainError):
        truncated_power_mean(0.5, 0, [3.0])


def test_sums_of_products_values():
    s = [1.0, 4.0, 9.0]
    assert sums_of_products(2, 0, s).estimate == pytest.approx(11 / 3, rel=1e-15)
    assert sums_of_products(1, 0, s).estimate == pytest.approx(np.mean(s), rel=1e-15)
    assert sums_of_products(3, 0, s).estimate == pytest.approx(geometric_mean(0, s).estimate, rel=1e-15)


def test_variance_proxy_values():
    assert empirical_variance_proxy(GeneratorSpec(-0.5, 1j), [2.0] * 5) == 0
    assert empirical_variance_proxy(GeneratorSpec(1, 0), [0, 2]) == pytest.approx(1)
    assert empirical_variance_proxy(GeneratorSpec(-1, 1j), [1, -1]) == pytest.approx(0.25)


def test_residual_ratio_values():
    assert truncation_residual_ratio(0.5, 0, 3 + 1j) == 0
    assert truncation_residual_ratio(0.5, 1, 1) == pytest.approx(2)


def test_residual_ratio_scale_invariant():
    grid = max(truncation_residual_ratio(0.5, 1, r * cmath.exp(1j * a))
               for r in np.logspace(-3, 3, 61) for a in np.linspace(0, PI, 31))
    assert truncation_residual_ratio(0.5, 1, 1e6) <= 1.05 * grid


def test_sampler_median_and_iqr(rng):
    x = sample_cauchy(1j, 1_000_000, rng)
    assert abs(np.median(x)) <= 3 * (PI / 2) / math.sqrt(x.size)
    y = sample_cauchy(2 + 3j, 1_000_000, rng)
    q1, q3 = np.percentile(y, [25, 75])
    assert (q3 - q1) / 2 == pytest.approx(3, rel=0.02)
    with pytest.raises(DomainError):
        sample_cauchy(1j, 0, rng)


@pytest.mark.parametrize("gamma,x,expected", [(1j, 0, 1 / PI), (1j, 1, 1 / (2 * PI)), (2 + 3j, 2, 1 / (3 * PI))])
def test_density_values(gamma, x, expected):
    assert float(cauchy_density(gamma, x)) == pytest.approx(expected, rel=1e-15)


def test_variance_values():
    assert asymptotic_variance_quadrature(-1, 1j, 1j) == pytest.approx(4, rel=1e-12)
    assert asymptotic_variance_quadrature(0, 0, 1j) == pytest.approx(PI**2 / 2, rel=1e-12)
    assert asymptotic_variance_quadrature(-1e-4, 1j, 1j) == pytest.approx(2 * PI**2 / 3, rel=1e-3)
    assert asymptotic_variance_cos(-0.25, 0, 1j) == pytest.approx(16 * (math.sqrt(2) - 1), rel=1e-14)
    assert asymptotic_variance_cos(-1e-4, 0, 1j) == pytest.approx(PI**2 / 2, rel=1e-4)
    assert asymptotic_variance_gamma(-1) == pytest.approx(4, abs=1e-12)
    assert asymptotic_variance_gamma(-1e-4) == pytest.approx(2 * PI**2 / 3, rel=1e-3)
    assert asymptotic_variance_gamma(-0.5) == pytest.approx(asymptotic_variance_quadrature(-0.5, 1j, 1j), rel=1e-6)


def test_rate_values():
    assert inaccuracy_rate(-1, 1j, 1j) == pytest.approx(0.25, rel=1e-12)
    assert inaccuracy_rate(0, 0, 1j) == pytest.approx(2 / PI**2, rel=1e-12)
    for p, alpha, gamma in [(-0.7, 1j, 2 + 3j), (-0.3, 0, 1j), (-0.05, 1 + 2j, -1 + 1j)]:
        assert inaccuracy_rate(p, alpha, gamma) * asymptotic_variance_quadrature(p, alpha, gamma) == pytest.approx(
            1, abs=1e-10)


def test_mle_three_points_against_grid():
    # the likelihood of [-1, 0, 1] at mu = 0 is sigma / (1 + sigma^2)^2, maximal at 1/sqrt(3)
    res = mle_fixed_point([-1.0, 0.0, 1.0], tol=1e-12)
    assert res.estimate == pytest.approx(1j / math.sqrt(3), abs=1e-10)
    mus = np.linspace(-1, 1, 801)
    sigmas = np.linspace(0.01, 2, 801)
    x = np.array([-1.0, 0.0, 1.0])
    ll = 3 * np.log(sigmas)[None, :] - np.log((x[None, None, :] - mus[:, None, None]) ** 2
                                              + sigmas[None, :, None] ** 2).sum(-1)
    i, j = np.unravel_index(np.argmax(ll), ll.shape)
    assert abs(res.estimate.real - mus[i]) <= mus[1] - mus[0]
    assert abs(res.estimate.imag - sigmas[j]) <= sigmas[1] - sigmas[0]


def test_influence_values():
    g = GeneratorSpec(-1, 1j)
    assert complex(influence_function(g, 1j, 0.0)) == pytest.approx(-2j, abs=1e-14)
    limit = -complex(generator_eval(g, 1j)) / complex(generator_derivative(g, 1j))
    assert complex(influence_function(g, 1j, 1e12)) == pytest.approx(limit, abs=1e-9)
    coarse = np.abs(influence_function(g, 1j, np.linspace(-100, 100, 2001))).max()
    fine = np.abs(influence_function(g, 1j, np.linspace(-100, 100, 20001))).max()
    assert math.isfinite(coarse) and fine == pytest.approx(coarse, rel=1e-3)


def test_mixture_recovers_anchor_roots():
    params = MixtureParams(0.5, 1j, 20 + 2j)
    est = solve_mixture(population_moments(params, 0.1))
    roots = {complex(principal_pow(1j, 0.1)), complex(principal_pow(20 + 2j, 0.1))}
    assert hausdorff_pair_distance((est.a1, est.a2), tuple(roots)) < 1e-10
    assert hausdorff_pair_distance(tuple(roots), (est.a1, est.a2)) < 1e-10
    assert est.t_hat == pytest.approx(0.5, abs=1e-10)


def test_mixture_label_symmetry():
    params = MixtureParams(0.25, 1j, 20 + 2j)
    est = solve_mixture(population_moments(params, 0.1))
    if abs(est.t_hat - 0.25) < 1e-9:
        assert est.gamma1_hat == pytest.approx(1j, abs=1e-7)
    else:
        assert est.t_hat == pytest.approx(0.75, abs=1e-9)
        assert est.gamma2_hat == pytest.approx(1j, abs=1e-7)


def test_hausdorff_values():
    assert hausdorff_pair_distance((1 + 2j, 3j), (1 + 2j, 3j)) == 0
    assert hausdorff_pair_distance((0j, 0j), (3 + 0j, 4 + 0j)) == 3
    assert hausdorff_pair_distance((0j, 10 + 0j), (0j, 0j)) == 10
    assert hausdorff_pair_distance((0j, 0j), (0j, 10 + 0j)) == 0


def test_single_trial_summary():
    s = TrialSummary.from_values([2 + 1j], n=10)
    assert s.variance == 0 and s.mean == 2 + 1j
