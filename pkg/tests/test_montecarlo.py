import math

import numpy as np
import pytest

from powmean.cauchy import ComplexParam
from powmean.complex_core import GeneratorSpec, principal_pow
from powmean.errors import DomainError, RegimeError
from powmean.mixture import MixtureParams
from powmean.qam import sums_of_products_rows
from powmean.montecarlo import (
    REFERENCE_TABLES,
    CauchyScenario,
    ComplexWelford,
    MixtureScenario,
    TrialConfig,
    TrialSummary,
    coverage_experiment,
    derive_seed,
    map_trials,
    prs_variance_sandwich_check,
    reproduce_tables,
    run_trials,
    sandwich_bounds,
    simulate,
    splitmix64,
    trial_rng,
    unbiasedness_check,
    variance_sweep,
)

I = ComplexParam(0.0, 1.0)


def test_splitmix64_reference_values():
    # first outputs of the reference generator seeded with 0
    golden = 0x9E3779B97F4A7C15
    outs = [splitmix64(k * golden % (1 << 64)) for k in range(3)]
    assert outs[0] == 0xE220A8397B1DCDAF
    assert outs[1] == 0x6E789E6AA1B965F4
    assert outs[2] == 0x06C45D188009454F


def test_derived_seeds_distinct():
    seeds = {derive_seed(7, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert derive_seed(7, 3) != derive_seed(8, 3)


def test_trial_rng_reproducible():
    a = trial_rng(5, 17).random(4)
    b = trial_rng(5, 17).random(4)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("scenario,n", [
    (CauchyScenario(I, "qam", -1, 1j), 30),
    (CauchyScenario(2 + 3j, "truncated", 0.5, 0), 5),
    (CauchyScenario(I, "sop", alpha=1j, m=3), 10),
    (CauchyScenario(I, "mle"), 12),
    (MixtureScenario(MixtureParams.from_tuple(0.25, 0, 1, 20, 2)), 200),
])
def test_determinism_across_workers(scenario, n):
    cfg = TrialConfig(42, 9000 if n < 100 else 300, n, scenario)
    one = simulate(cfg, workers=1)
    four = simulate(cfg, workers=4)
    assert one.tobytes() == four.tobytes()


def test_different_seeds_differ():
    sc = CauchyScenario(I)
    assert not np.array_equal(simulate(TrialConfig(1, 50, 10, sc)), simulate(TrialConfig(2, 50, 10, sc)))


def test_trials_prefix_stable():
    # trial i depends only on (seed, i): a longer run extends a shorter one
    sc = CauchyScenario(I)
    short = simulate(TrialConfig(3, 100, 20, sc))
    long = simulate(TrialConfig(3, 250, 20, sc))
    np.testing.assert_array_equal(short, long[:100])


def test_failing_trial_is_identified():
    def draw(rng, n):
        return np.zeros(n)

    with pytest.raises(DomainError, match="trial 0"):
        map_trials(0, 3, 4, draw, lambda x: np.asarray(GeneratorSpec(-1, 0)(x)).mean(axis=-1))


def test_welford_matches_two_pass(rng):
    z = rng.standard_cauchy(100_000) * 1e3 + 1j * rng.normal(size=100_000) + (5 - 2j) * 1e6
    acc = ComplexWelford()
    for chunk in np.array_split(z, 37):
        acc.update(chunk)
    d = z - z.mean()
    two_pass = float(np.sum(d.real**2 + d.imag**2) / (z.size - 1))
    assert acc.variance == pytest.approx(two_pass, rel=1e-12)
    assert acc.var_re == pytest.approx(np.var(z.real, ddof=1), rel=1e-12)
    assert acc.var_im == pytest.approx(np.var(z.imag, ddof=1), rel=1e-12)
    assert acc.variance == pytest.approx(acc.var_re + acc.var_im, rel=1e-12)
    assert acc.mean == pytest.approx(z.mean(), rel=1e-14)


def test_welford_push_and_update_agree(rng):
    z = rng.normal(size=500) + 1j * rng.normal(size=500)
    a, b = ComplexWelford(), ComplexWelford()
    for v in z:
        a.push(v)
    b.update(z[:123])
    b.update(z[123:])
    assert a.variance == pytest.approx(b.variance, rel=1e-12)
    assert a.mean == pytest.approx(b.mean, rel=1e-12)


def test_summary_scaled_variance(rng):
    z = rng.normal(size=1000) + 0j
    s = TrialSummary.from_values(z, n=50)
    assert s.scaled_variance == pytest.approx(50 * np.var(z.real, ddof=1), rel=1e-12)
    assert s.std_error == pytest.approx(math.sqrt(s.variance / 1000))


def test_config_validation():
    with pytest.raises(DomainError):
        TrialConfig(0, 0, 10, CauchyScenario(I))
    with pytest.raises(DomainError):
        CauchyScenario(I, "median")
    with pytest.raises(DomainError):
        CauchyScenario(I, "truncated", p=1.5)


def test_config_dict():
    d = TrialConfig(1, 10, 5, CauchyScenario(2 + 3j, alpha=1j)).to_dict()
    assert d["scenario"]["gamma"] == {"re": 2.0, "im": 3.0}
    assert d["reps"] == 10


@pytest.mark.parametrize("estimator,p,alpha,m,n", [
    ("qam", 1.0, 1j, 2, 10),
    ("qam", -1.0, 0, 2, 10),
    ("qam", -0.5, 0, 2, 1),
    ("sop", 0, 1j, 5, 3),
    ("mle", -1, 1j, 2, 10),
])
def test_unbiasedness_regime_errors(estimator, p, alpha, m, n):
    cfg = TrialConfig(0, 10, n, CauchyScenario(I, estimator, p, alpha, m))
    with pytest.raises(RegimeError):
        unbiasedness_check(cfg)


def test_unbiasedness_small_run():
    rep = unbiasedness_check(TrialConfig(1, 20_000, 5, CauchyScenario(2 + 3j, "qam", -1, 1j)))
    assert rep.passed and rep.z <= 4
    assert rep.target == 2 + 3j


def test_sweep_marks_divergent_rows():
    rows = variance_sweep([-1.0, 0.75], 0, I, 50, 200, 0)
    assert rows[0].theoretical is None and "diverges" in rows[0].error
    assert rows[1].theoretical is None and "infinite variance" in rows[1].error
    assert all(math.isfinite(r.empirical) for r in rows)


def test_sweep_small_run_close_to_theory():
    (row,) = variance_sweep([-0.5], 1j, I, 1000, 2000, 4)
    assert row.theoretical == pytest.approx(4.3718, rel=1e-3)
    assert row.rel_gap < 0.1


def test_coverage_regime_error():
    with pytest.raises(RegimeError):
        coverage_experiment(GeneratorSpec(-1, 0), I, 100, 0.05, 10, 0)


def test_coverage_small_run():
    cov = coverage_experiment(GeneratorSpec(-0.5, 1j), I, 400, 0.1, 2000, 3)
    assert 0.87 <= cov <= 0.93


def test_coverage_half_level():
    cov = coverage_experiment(GeneratorSpec(-1, 1j), I, 200, 0.5, 10_000, 11)
    assert 0.48 <= cov <= 0.52


def test_coverage_gap_shrinks_with_n():
    g = GeneratorSpec(-1, 1j)
    small = coverage_experiment(g, I, 10, 0.05, 10_000, 12)
    large = coverage_experiment(g, I, 1000, 0.05, 10_000, 12)
    assert abs(large - 0.95) < abs(small - 0.95)


def test_sums_of_products_full_subset_is_product_of_roots(rng):
    m, alpha = 5, 1j
    x = rng.standard_cauchy((200, m))
    prod = np.prod(principal_pow(x + alpha, 1.0 / m), axis=-1) - alpha
    np.testing.assert_allclose(sums_of_products_rows(m, alpha, x), prod, rtol=1e-12, atol=1e-12)


def test_sandwich_upper_bound_attained_at_m_equals_n():
    # R_{m,m} = G_m, so n Var(R_{m,m}) equals the upper bound m Var(G_m)
    rep = prs_variance_sandwich_check(5, 1j, I, 5, 50_000, 13)
    assert rep.passed
    assert abs(rep.empirical - rep.upper) <= 3 * rep.std_error


def test_sandwich_bounds_m3_finite():
    lo, hi = sandwich_bounds(3, 1j, I)
    assert 0 < lo < hi < math.inf


def test_sandwich_bounds_m2_upper_infinite():
    # E|X + i| diverges for Cauchy data
    lo, hi = sandwich_bounds(2, 1j, I)
    assert hi == math.inf and lo > 0


def test_sandwich_regime_error():
    with pytest.raises(RegimeError):
        prs_variance_sandwich_check(5, 1j, I, 3, 10, 0)


def test_reference_tables_shape():
    for table in REFERENCE_TABLES.values():
        assert len(table["values"]) == 3 and all(len(r) == 4 for r in table["values"])


def test_tables_unknown():
    with pytest.raises(DomainError):
        reproduce_tables(3)


def test_tables_small_run_format():
    res = reproduce_tables(2, n_list=[100], t_list=[0.5], reps=50, master_seed=1)
    cell = res.cell(100, 0.5)
    assert cell.reference == 0.449
    assert "1/2" in res.format() and "(0.449)" in res.format()


def test_run_trials_mean_unbiased_sop():
    s = run_trials(TrialConfig(9, 20_000, 6, CauchyScenario(I, "sop", alpha=1j, m=3)))
    assert abs(s.mean - 1j) <= 4 * s.std_error
