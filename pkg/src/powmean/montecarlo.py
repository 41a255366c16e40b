"""Deterministic Monte Carlo harness.

Every trial owns a PCG64 stream seeded from ``(master_seed, trial_index)``
through a splitmix64 mix, so results do not depend on how trials are
scheduled.  Trials are generated and reduced in fixed-size blocks; workers
only decide which thread fills which block.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from powmean.cauchy import (
    ComplexParam,
    _param,
    asymptotic_variance_quadrature,
    cauchy_expectation,
    disc_rows,
    l2_regime,
    mle_fixed_point,
)
from powmean.complex_core import GeneratorSpec
from powmean.errors import DomainError, PowmeanError, RegimeError
from powmean.mixture import (
    DEFAULT_ALPHA_EXP,
    MixtureParams,
    estimate_mixture_rows,
    hausdorff_rows,
)
from powmean.qam import qam_rows, sums_of_products_rows, truncated_rows

__all__ = [
    "CauchyScenario",
    "ComplexWelford",
    "MixtureScenario",
    "REFERENCE_TABLES",
    "TrialConfig",
    "TrialSummary",
    "coverage_experiment",
    "derive_seed",
    "prs_variance_sandwich_check",
    "reproduce_tables",
    "run_trials",
    "simulate",
    "splitmix64",
    "unbiasedness_check",
    "variance_sweep",
]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_BLOCK_ELEMENTS = 1 << 20


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for stream ``index`` under ``master_seed``."""
    return splitmix64((master_seed & _MASK) ^ splitmix64(index & _MASK))


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, index)))


# -- scenarios -----------------------------------------------------------------

ESTIMATORS = ("qam", "truncated", "sop", "mle")


@dataclass(frozen=True)
class CauchyScenario:
    """Cauchy data with one of the estimators.

    ``estimator`` is ``qam`` (power mean with ``p``, ``alpha``; ``p = 0`` is
    the geometric mean), ``truncated`` (``0 < p < 1``), ``sop`` (sums of
    products of order ``m``) or ``mle``.
    """

    gamma: ComplexParam
    estimator: str = "qam"
    p: float = -1.0
    alpha: complex = 1j
    m: int = 2

    def __post_init__(self):
        object.__setattr__(self, "gamma", _param(self.gamma))
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.estimator not in ESTIMATORS:
            raise DomainError(f"unknown estimator {self.estimator!r}; choose from {ESTIMATORS}")
        if self.estimator == "qam":
            GeneratorSpec(self.p, self.alpha)
        elif self.estimator == "truncated" and not 0 < self.p < 1:
            raise DomainError(f"truncated estimator needs 0 < p < 1, got {self.p}")
        elif self.estimator == "sop" and self.m < 1:
            raise DomainError(f"sums of products need m >= 1, got {self.m}")

    @property
    def generator(self) -> GeneratorSpec:
        return GeneratorSpec(self.p, self.alpha)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = 1.0 - rng.random(n)
        return self.gamma.mu + self.gamma.sigma * np.tan(np.pi * (u - 0.5))

    def statistic(self, x: np.ndarray) -> np.ndarray:
        if self.estimator == "qam":
            return qam_rows(self.generator, x)
        if self.estimator == "truncated":
            return truncated_rows(self.p, self.alpha, x)
        if self.estimator == "sop":
            return sums_of_products_rows(self.m, self.alpha, x)
        return np.array([mle_fixed_point(row).estimate for row in x])

    def to_dict(self) -> dict:
        return {
            "kind": "cauchy",
            "gamma": _cjson(self.gamma.value),
            "estimator": self.estimator,
            "p": self.p,
            "alpha": _cjson(self.alpha),
            "m": self.m,
        }


@dataclass(frozen=True)
class MixtureScenario:
    """Mixture Cauchy data; the trial statistic is the directed Hausdorff error of the root pair."""

    params: MixtureParams
    alpha_exp: float = DEFAULT_ALPHA_EXP

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params
        second = rng.random(n) < p.t
        u = 1.0 - rng.random(n)
        z = np.tan(np.pi * (u - 0.5))
        return np.where(second, p.gamma2.mu, p.gamma1.mu) + np.where(
            second, p.gamma2.sigma, p.gamma1.sigma
        ) * z

    def statistic(self, x: np.ndarray) -> np.ndarray:
        a1, a2 = estimate_mixture_rows(x, self.alpha_exp)
        c, d = self.params.roots(self.alpha_exp)
        return hausdorff_rows(a1, a2, c, d).astype(np.complex128)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "kind": "mixture",
            "t": p.t,
            "gamma1": _cjson(p.gamma1.value),
            "gamma2": _cjson(p.gamma2.value),
            "alpha_exp": self.alpha_exp,
        }


Scenario = Union[CauchyScenario, MixtureScenario]


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


@dataclass(frozen=True)
class TrialConfig:
    master_seed: int
    reps: int
    n: int
    scenario: Scenario

    def __post_init__(self):
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}")
        if self.n < 1:
            raise DomainError(f"sample size must be >= 1, got {self.n}")

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "reps": self.reps,
            "n": self.n,
            "scenario": self.scenario.to_dict(),
        }


# -- aggregation ----------------------------------------------------------------


class ComplexWelford:
    """One-pass mean and variance of complex values.

    Batches are merged with Chan's pairwise update; the variance is
    ``Var(Re) + Var(Im)`` with the ``count - 1`` denominator.
    """

    def __init__(self):
        self.count = 0
        self.mean = 0j
        self.m2_re = 0.0
        self.m2_im = 0.0

    def push(self, z) -> None:
        z = complex(z)
        self.count += 1
        delta = z - self.mean
        self.mean += delta / self.count
        after = z - self.mean
        self.m2_re += delta.real * after.real
        self.m2_im += delta.imag * after.imag

    def update(self, values) -> None:
        values = np.asarray(values, dtype=np.complex128).ravel()
        k = values.size
        if k == 0:
            return
        b_mean = values.mean()
        d = values - b_mean
        b_re = float(np.dot(d.real, d.real))
        b_im = float(np.dot(d.imag, d.imag))
        total = self.count + k
        delta = b_mean - self.mean
        self.m2_re += b_re + delta.real**2 * self.count * k / total
        self.m2_im += b_im + delta.imag**2 * self.count * k / total
        self.mean += delta * k / total
        self.count = total

    @property
    def var_re(self) -> float:
        return self.m2_re / (self.count - 1) if self.count > 1 else 0.0

    @property
    def var_im(self) -> float:
        return self.m2_im / (self.count - 1) if self.count > 1 else 0.0

    @property
    def variance(self) -> float:
        return self.var_re + self.var_im


@dataclass(frozen=True)
class TrialSummary:
    mean: complex
    variance: float
    count: int
    std_error: float
    scaled_variance: float
    var_re: float = 0.0
    var_im: float = 0.0

    @classmethod
    def from_values(cls, values, n: int, chunk: int = 4096) -> TrialSummary:
        acc = ComplexWelford()
        values = np.asarray(values, dtype=np.complex128)
        for start in range(0, values.size, chunk):
            acc.update(values[start : start + chunk])
        var = acc.variance
        return cls(acc.mean, var, acc.count, math.sqrt(var / acc.count), n * var,
                   acc.var_re, acc.var_im)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean"] = _cjson(self.mean)
        return d


# -- trial execution --------------------------------------------------------------


def _block_size(n: int) -> int:
    return max(1, min(4096, _BLOCK_ELEMENTS // max(n, 1)))


def map_trials(
    master_seed: int,
    reps: int,
    n: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
    reduce_rows: Callable[[np.ndarray], np.ndarray],
    *,
    workers: int = 1,
    dtype=np.complex128,
) -> np.ndarray:
    """Run ``reps`` trials and return the per-trial values in trial order.

    Trial ``i`` draws its sample from ``trial_rng(master_seed, i)``; samples
    are stacked into fixed blocks and reduced row-wise.  A failing trial is
    reported with its index.
    """
    size = _block_size(n)
    starts = list(range(0, reps, size))
    out = np.empty(reps, dtype=dtype)

    def run_block(start: int) -> None:
        stop = min(start + size, reps)
        x = np.stack([draw(trial_rng(master_seed, i), n) for i in range(start, stop)])
        try:
            out[start:stop] = reduce_rows(x)
        except PowmeanError:
            for offset, row in enumerate(x):
                try:
                    reduce_rows(row[None, :])
                except PowmeanError as exc:
                    raise type(exc)(f"trial {start + offset}: {exc}") from exc
            raise

    if workers <= 1 or len(starts) == 1:
        for s in starts:
            run_block(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_block, starts))
    return out


def simulate(cfg: TrialConfig, workers: int = 1) -> np.ndarray:
    """Per-trial statistics for ``cfg`` (complex, in trial order)."""
    sc = cfg.scenario
    return map_trials(cfg.master_seed, cfg.reps, cfg.n, sc.draw, sc.statistic, workers=workers)


def run_trials(cfg: TrialConfig, workers: int = 1) -> TrialSummary:
    return TrialSummary.from_values(simulate(cfg, workers), cfg.n)


# -- experiments ------------------------------------------------------------------


@dataclass(frozen=True)
class UnbiasednessReport:
    mean: complex
    target: complex
    abs_error: float
    std_error: float
    z: float
    passed: bool
    threshold: float = 4.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean"] = _cjson(self.mean)
        d["target"] = _cjson(self.target)
        return d


def check_unbiased_regime(sc: Scenario, n: int) -> None:
    """Raise :class:`RegimeError` unless ``E[estimator] = gamma`` is established for ``(sc, n)``."""
    if not isinstance(sc, CauchyScenario):
        raise RegimeError("unbiasedness is only established for Cauchy power-mean scenarios")
    if sc.estimator == "mle":
        raise RegimeError("no unbiasedness result is available for the MLE")
    if sc.estimator == "sop":
        if sc.m < 2 or n < sc.m:
            raise RegimeError(f"sums of products need 2 <= m <= n, got m={sc.m}, n={n}")
        return
    if n < 2:
        raise RegimeError("unbiasedness needs n >= 2; a single observation is not integrable")
    if sc.estimator == "truncated":
        return
    p, alpha = sc.p, sc.alpha
    if p > 0:
        raise RegimeError(
            f"positive power mean p={p} is not integrable for Cauchy data; use the truncated statistic"
        )
    if p == -1 and alpha.imag == 0:
        raise RegimeError(
            "p = -1 with a real shift: the power mean is not integrable (needs alpha in the open upper half-plane)"
        )


def unbiasedness_check(cfg: TrialConfig, target=None, workers: int = 1,
                       threshold: float = 4.0) -> UnbiasednessReport:
    """Compare the Monte Carlo mean with ``target`` (default: the true ``gamma``)."""
    sc = cfg.scenario
    check_unbiased_regime(sc, cfg.n)
    target = sc.gamma.value if target is None else complex(target)
    summary = run_trials(cfg, workers)
    err = abs(summary.mean - target)
    z = err / summary.std_error if summary.std_error > 0 else (0.0 if err == 0 else math.inf)
    return UnbiasednessReport(summary.mean, target, err, summary.std_error, z, z <= threshold, threshold)


def _variance_regime(p: float, alpha: complex) -> str | None:
    try:
        GeneratorSpec(p, alpha)
        if p > 0:
            return f"p={p} > 0: the power mean has infinite variance"
        if alpha.imag == 0 and p <= -0.5:
            return f"asymptotic variance diverges for p={p} <= -1/2 with a real shift"
    except DomainError as exc:
        return str(exc)
    return None


@dataclass(frozen=True)
class SweepRow:
    p: float
    empirical: float
    theoretical: float | None
    rel_gap: float | None
    std_error: float
    error: str | None = None


def variance_sweep(p_grid: Sequence[float], alpha, gamma, n: int, reps: int, master_seed: int,
                   workers: int = 1) -> list[SweepRow]:
    """Empirical ``n Var(M_n)`` against ``V(p)`` for each exponent in ``p_grid``.

    Rows in a divergent regime keep their empirical value and carry the
    regime message instead of a theoretical value.
    """
    alpha = complex(alpha)
    gamma = _param(gamma)
    rows = []
    for i, p in enumerate(p_grid):
        p = float(p)
        error = _variance_regime(p, alpha)
        theory = None
        if error is None:
            try:
                theory = asymptotic_variance_quadrature(p, alpha, gamma)
            except PowmeanError as exc:
                error = str(exc)
        cfg = TrialConfig(derive_seed(master_seed, i), reps, n,
                          CauchyScenario(gamma, "qam", p, alpha))
        values = simulate(cfg, workers)
        summary = TrialSummary.from_values(values, n)
        se = _scaled_variance_se(values, n)
        gap = None if theory is None else abs(summary.scaled_variance - theory) / theory
        rows.append(SweepRow(p, summary.scaled_variance, theory, gap, se, error))
    return rows


def _scaled_variance_se(values: np.ndarray, n: int) -> float:
    d = values - values.mean()
    sq = d.real**2 + d.imag**2
    return n * float(sq.std(ddof=1) / math.sqrt(sq.size)) if sq.size > 1 else math.inf


# Published reference values: rows n = 100, 1000, 10000; columns t = 1/6, 1/4, 1/3, 1/2.
REFERENCE_TABLES = {
    1: {
        "params": (0.0, 1.0, 20.0, 2.0),
        "values": ((0.162, 0.114, 0.092, 0.080),
                   (0.073, 0.047, 0.036, 0.030),
                   (0.025, 0.017, 0.013, 0.010)),
    },
    2: {
        "params": (0.0, 1.0, 5.0, 6.0),
        "values": ((0.549, 0.470, 0.433, 0.449),
                   (0.234, 0.181, 0.157, 0.152),
                   (0.088, 0.065, 0.055, 0.045)),
    },
}
TABLE_N = (100, 1000, 10000)
TABLE_T = (1 / 6, 1 / 4, 1 / 3, 1 / 2)


@dataclass(frozen=True)
class TableCell:
    n: int
    t: float
    value: float
    std_error: float
    reference: float | None

    @property
    def rel_error(self) -> float | None:
        if self.reference is None:
            return None
        return abs(self.value - self.reference) / self.reference


@dataclass(frozen=True)
class TableResult:
    which: int
    params: tuple[float, float, float, float]
    n_list: tuple[int, ...]
    t_list: tuple[float, ...]
    reps: int
    cells: tuple[TableCell, ...] = field(default_factory=tuple)

    def cell(self, n: int, t: float) -> TableCell:
        for c in self.cells:
            if c.n == n and math.isclose(c.t, t):
                return c
        raise KeyError((n, t))

    def format(self) -> str:
        head = "n \\ t".ljust(8) + "".join(f"{_frac(t):>16}" for t in self.t_list)
        lines = [f"Table {self.which}: (mu1, sigma1, mu2, sigma2) = {self.params}, reps={self.reps}", head]
        for n in self.n_list:
            parts = []
            for t in self.t_list:
                c = self.cell(n, t)
                ref = "" if c.reference is None else f" ({c.reference:.3f})"
                parts.append(f"{c.value:.3f}{ref}".rjust(16))
            lines.append(f"{n:<8}" + "".join(parts))
        return "\n".join(lines)


def _frac(t: float) -> str:
    for den in (2, 3, 4, 6):
        if math.isclose(t * den, round(t * den)) and round(t * den) == 1:
            return f"1/{den}"
    return f"{t:g}"


def reproduce_tables(which: int, n_list: Sequence[int] = TABLE_N, t_list: Sequence[float] = TABLE_T,
                     reps: int = 1000, master_seed: int = 0, alpha_exp: float = DEFAULT_ALPHA_EXP,
                     workers: int = 1) -> TableResult:
    """Mean directed Hausdorff error of the root pair for each ``(n, t)`` cell."""
    if which not in REFERENCE_TABLES:
        raise DomainError(f"unknown table {which}; choose 1 or 2")
    table = REFERENCE_TABLES[which]
    mu1, s1, mu2, s2 = table["params"]
    cells = []
    for i, n in enumerate(n_list):
        for j, t in enumerate(t_list):
            params = MixtureParams.from_tuple(t, mu1, s1, mu2, s2)
            cfg = TrialConfig(derive_seed(master_seed, i * 1000 + j), reps, n,
                              MixtureScenario(params, alpha_exp))
            summary = run_trials(cfg, workers)
            ref = None
            if n in TABLE_N and any(math.isclose(t, tt) for tt in TABLE_T) and alpha_exp == 0.1:
                ref = table["values"][TABLE_N.index(n)][[k for k, tt in enumerate(TABLE_T)
                                                        if math.isclose(t, tt)][0]]
            cells.append(TableCell(n, t, summary.mean.real, summary.std_error, ref))
    return TableResult(which, table["params"], tuple(n_list), tuple(t_list), reps, tuple(cells))


def coverage_experiment(g: GeneratorSpec, gamma, n: int, a: float, reps: int, master_seed: int,
                        workers: int = 1) -> float:
    """Fraction of trials whose asymptotic confidence disc contains ``gamma``."""
    if not l2_regime(g):
        raise RegimeError(f"f(X) is not square integrable for p={g.p}, alpha={g.alpha}")
    if n < 2:
        raise DomainError("confidence discs need n >= 2")
    gamma = _param(gamma)
    sc = CauchyScenario(gamma, "qam", g.p, g.alpha)

    def hits(x):
        center, radius = disc_rows(g, x, a)
        return (np.abs(center - gamma.value) < radius).astype(float)

    covered = map_trials(master_seed, reps, n, sc.draw, hits, workers=workers, dtype=float)
    return float(covered.mean())


@dataclass(frozen=True)
class SandwichReport:
    m: int
    n: int
    empirical: float
    std_error: float
    lower: float
    upper: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def sandwich_bounds(m: int, alpha, gamma) -> tuple[float, float]:
    """Lower and upper bounds on ``n Var(R_{m,n})`` from single-draw moments.

    With ``Y = X + alpha``, ``A = E|Y|^{2/m}`` and ``c = |E[Y^{1/m}]|``:
    ``Var(G_m) = A^m - c^{2m}``, upper ``m Var(G_m)``, lower
    ``m Var(G_m) c^{2m} / A^m``.  An infinite ``A`` gives
    ``(m c^{2m}, inf)``.
    """
    alpha = complex(alpha)
    gamma = _param(gamma)
    a_mom = cauchy_expectation(lambda y: np.abs(y) ** (2.0 / m), gamma, alpha, power=2.0 / m)
    mean_root = cauchy_expectation(lambda y: np.exp(np.log(y) / m), gamma, alpha, power=1.0 / m)
    c2m = abs(mean_root) ** (2 * m)
    if math.isinf(a_mom):
        return m * c2m, math.inf
    var_g = a_mom**m - c2m
    upper = m * var_g
    return upper * c2m / a_mom**m, upper


def prs_variance_sandwich_check(m: int, alpha, gamma, n: int, reps: int, master_seed: int,
                                workers: int = 1, k_se: float = 3.0) -> SandwichReport:
    """Check ``lower <= n Var(R_{m,n}) <= upper`` within ``k_se`` standard errors."""
    if m < 2 or n < m:
        raise RegimeError(f"the variance sandwich needs 2 <= m <= n, got m={m}, n={n}")
    alpha = complex(alpha)
    if alpha.imag < 0:
        raise DomainError(f"shift alpha={alpha} lies in the lower half-plane")
    gamma = _param(gamma)
    lower, upper = sandwich_bounds(m, alpha, gamma)
    cfg = TrialConfig(master_seed, reps, n, CauchyScenario(gamma, "sop", alpha=alpha, m=m))
    values = simulate(cfg, workers)
    emp = TrialSummary.from_values(values, n).scaled_variance
    se = _scaled_variance_se(values, n)
    ok = lower - k_se * se <= emp <= upper + k_se * se
    return SandwichReport(m, n, emp, se, lower, upper, bool(ok))
