"""Complex-valued power means as closed-form estimators for the Cauchy family."""

from powmean.cauchy import (
    ComplexParam,
    ConfidenceDisc,
    asymptotic_variance_cos,
    asymptotic_variance_gamma,
    asymptotic_variance_quadrature,
    cauchy_density,
    confidence_disc,
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
from powmean.errors import DomainError, NonConvergenceError, PowmeanError, RegimeError
from powmean.mixture import (
    MixtureEstimate,
    MixtureParams,
    MomentTriple,
    estimate_mixture,
    fractional_moment_vector,
    hausdorff_pair_distance,
    population_moments,
    sample_mixture,
    solve_mixture,
)
from powmean.qam import (
    EstimateResult,
    empirical_variance_proxy,
    geometric_mean,
    quasi_arithmetic_mean,
    sums_of_products,
    truncated_power_mean,
    truncation_residual_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexParam",
    "ConfidenceDisc",
    "DomainError",
    "EstimateResult",
    "GeneratorSpec",
    "MixtureEstimate",
    "MixtureParams",
    "MomentTriple",
    "NonConvergenceError",
    "PowmeanError",
    "RegimeError",
    "asymptotic_variance_cos",
    "asymptotic_variance_gamma",
    "asymptotic_variance_quadrature",
    "cauchy_density",
    "confidence_disc",
    "empirical_variance_proxy",
    "estimate_mixture",
    "fractional_moment_vector",
    "generator_derivative",
    "generator_eval",
    "generator_inverse",
    "geometric_mean",
    "hausdorff_pair_distance",
    "inaccuracy_rate",
    "influence_function",
    "mle_fixed_point",
    "population_moments",
    "principal_log",
    "principal_pow",
    "quasi_arithmetic_mean",
    "sample_cauchy",
    "sample_mixture",
    "solve_mixture",
    "sums_of_products",
    "truncated_power_mean",
    "truncation_residual_ratio",
]
