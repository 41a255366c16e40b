"""Command-line interface: ``powmean estimate | mixture | mle | simulate | replay``.

Exit codes: 0 success, 1 a simulation missed its pass threshold, 2 invalid
input, 3 parameters outside the regime where the result holds, 4 an
iteration did not converge.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from powmean.cauchy import (
    ComplexParam,
    asymptotic_variance_quadrature,
    confidence_disc,
    fixed_point_map,
    mle_fixed_point,
)
from powmean.complex_core import GeneratorSpec
from powmean.errors import NonConvergenceError, PowmeanError, RegimeError
from powmean.mixture import estimate_mixture
from powmean.montecarlo import (
    TABLE_N,
    TABLE_T,
    CauchyScenario,
    TrialConfig,
    coverage_experiment,
    prs_variance_sandwich_check,
    reproduce_tables,
    unbiasedness_check,
    variance_sweep,
)
from powmean.qam import quasi_arithmetic_mean
from powmean.records import RunRecord, format_complex, parse_complex, read_sample, to_jsonable

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_VALIDATION = 2
EXIT_REGIME = 3
EXIT_NONCONVERGENCE = 4


def _fraction(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _float_list(text: str) -> list[float]:
    return [_fraction(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(float(t)) for t in text.split(",") if t.strip()]


def _count(text: str) -> int:
    return int(float(text))


def _default_seed() -> int:
    env = os.environ.get("POWMEAN_SEED")
    return int(env) if env else 0


# -- runners: config dict -> (results dict, passed, text) ---------------------------
# Each runner is a pure function of its config so records can be replayed.


def run_estimate(cfg: dict, workers: int = 1):
    x = read_sample(cfg["input"])
    g = GeneratorSpec(cfg["p"], parse_complex(cfg["alpha"]))
    res = quasi_arithmetic_mean(g, x)
    out = {
        "estimate": res.estimate,
        "mu": res.mu,
        "sigma": res.sigma,
        "n": res.n,
        "variance_proxy": res.variance_proxy,
        "warnings": list(res.warnings),
    }
    lines = [f"estimate = {format_complex(res.estimate)}",
             f"mu={res.mu + 0.0:.12g} sigma={res.sigma + 0.0:.12g} (n={res.n})"]
    lines += [f"warning: {w}" for w in res.warnings]
    if cfg.get("disc") is not None:
        disc = confidence_disc(g, x, cfg["disc"])
        out["disc"] = {"center": disc.center, "radius": disc.radius, "level": disc.level,
                       "degenerate": disc.degenerate}
        lines.append(f"{disc.level:.0%} disc: center={format_complex(disc.center)} radius={disc.radius:.6g}"
                     + (" (degenerate)" if disc.degenerate else ""))
    return out, None, "\n".join(lines)


def run_mixture(cfg: dict, workers: int = 1):
    x = read_sample(cfg["input"])
    est = estimate_mixture(x, cfg["alpha_exp"])
    first = est.canonical()
    second = first.swapped()
    labels = []
    lines = []
    for name, e in (("primary", first), ("swapped", second)):
        labels.append({"t": e.t_hat, "gamma1": e.gamma1_hat, "gamma2": e.gamma2_hat,
                       "a1": e.a1, "a2": e.a2})
        lines.append(f"{name}: t={e.t_hat:.6g} gamma1={format_complex(e.gamma1_hat, 8)} "
                     f"gamma2={format_complex(e.gamma2_hat, 8)}")
    lines.append(f"branch={est.branch} Im(t)={est.t_imag:.3g}" + (" LOW QUALITY" if est.low_quality else ""))
    out = {"labelings": labels, "branch": est.branch, "t_imag": est.t_imag,
           "low_quality": est.low_quality, "n": int(x.size)}
    return out, None, "\n".join(lines)


def run_mle(cfg: dict, workers: int = 1):
    x = read_sample(cfg["input"])
    res = mle_fixed_point(x, parse_complex(cfg["start"]), cfg["tol"], cfg["max_iter"])
    check = abs(fixed_point_map(x, res.estimate) - res.estimate)
    lines = [f"iter {i:4d}  |Y_m - Y_(m-1)| = {d:.3e}" for i, d in enumerate(res.steps, start=1)]
    lines.append(f"MLE = {format_complex(res.estimate)}  (mu={res.estimate.real + 0.0:.12g} "
                 f"sigma={res.estimate.imag + 0.0:.12g})")
    lines.append(f"|Q(g) - g| = {check:.3e}" + ("" if res.converged else "  NOT CONVERGED"))
    out = {"estimate": res.estimate, "converged": res.converged, "iterations": res.iterations,
           "steps": list(res.steps), "fixed_point_residual": check}
    return out, res.converged, "\n".join(lines)


def run_variance_sweep(cfg: dict, workers: int = 1):
    rows = variance_sweep(cfg["p"], parse_complex(cfg["alpha"]), parse_complex(cfg["gamma"]),
                          cfg["n"], cfg["reps"], cfg["seed"], workers)
    tol = cfg["tol"]
    lines = [f"{'p':>10} {'n*Var':>12} {'V(p)':>12} {'rel gap':>10}"]
    passed = True
    out = []
    for r in rows:
        theory = "-" if r.theoretical is None else f"{r.theoretical:.6g}"
        gap = "-" if r.rel_gap is None else f"{r.rel_gap:.4f}"
        lines.append(f"{r.p:>10.6g} {r.empirical:>12.6g} {theory:>12} {gap:>10}"
                     + (f"  [{r.error}]" if r.error else ""))
        if r.rel_gap is not None and r.rel_gap > tol:
            passed = False
        out.append({"p": r.p, "empirical": r.empirical, "theoretical": r.theoretical,
                    "rel_gap": r.rel_gap, "std_error": r.std_error, "error": r.error})
    return {"rows": out, "passed": passed}, passed, "\n".join(lines)


def run_tables(cfg: dict, workers: int = 1):
    which = [1, 2] if cfg["which"] == "both" else [int(cfg["which"])]
    tol = cfg["tol"]
    passed = True
    texts, tables = [], []
    for w in which:
        res = reproduce_tables(w, cfg["n_list"], cfg["t_list"], cfg["reps"], cfg["seed"],
                               cfg["alpha_exp"], workers)
        texts.append(res.format())
        cells = []
        for c in res.cells:
            if c.rel_error is not None and c.rel_error > tol:
                passed = False
            cells.append({"n": c.n, "t": c.t, "value": c.value, "std_error": c.std_error,
                          "reference": c.reference, "rel_error": c.rel_error})
        tables.append({"which": w, "params": list(res.params), "cells": cells})
    return {"tables": tables, "passed": passed}, passed, "\n\n".join(texts)


def run_coverage(cfg: dict, workers: int = 1):
    g = GeneratorSpec(cfg["p"], parse_complex(cfg["alpha"]))
    cov = coverage_experiment(g, parse_complex(cfg["gamma"]), cfg["n"], cfg["a"], cfg["reps"],
                              cfg["seed"], workers)
    target = 1.0 - cfg["a"]
    passed = abs(cov - target) <= cfg["tol"]
    text = f"coverage = {cov:.4f} (nominal {target:.4f}, reps={cfg['reps']}, n={cfg['n']})"
    return {"coverage": cov, "nominal": target, "passed": passed}, passed, text


def run_unbiasedness(cfg: dict, workers: int = 1):
    sc = CauchyScenario(ComplexParam.from_complex(parse_complex(cfg["gamma"])), cfg["estimator"],
                        cfg["p"], parse_complex(cfg["alpha"]), cfg["m"])
    rep = unbiasedness_check(TrialConfig(cfg["seed"], cfg["reps"], cfg["n"], sc),
                             workers=workers, threshold=cfg["threshold"])
    text = (f"mean = {format_complex(rep.mean)}  target = {format_complex(rep.target)}\n"
            f"|mean - target| = {rep.abs_error:.4g}  SE = {rep.std_error:.4g}  z = {rep.z:.3f}  "
            + ("PASS" if rep.passed else "FAIL"))
    return rep.to_dict(), rep.passed, text


def run_prs(cfg: dict, workers: int = 1):
    rep = prs_variance_sandwich_check(cfg["m"], parse_complex(cfg["alpha"]), parse_complex(cfg["gamma"]),
                                      cfg["n"], cfg["reps"], cfg["seed"], workers)
    text = (f"n*Var(R_{{{rep.m},{rep.n}}}) = {rep.empirical:.6g} +- {rep.std_error:.3g}\n"
            f"bounds [{rep.lower:.6g}, {rep.upper:.6g}]  " + ("PASS" if rep.passed else "FAIL"))
    return rep.to_dict(), rep.passed, text


def run_theory(cfg: dict, workers: int = 1):
    v = asymptotic_variance_quadrature(cfg["p"], parse_complex(cfg["alpha"]), parse_complex(cfg["gamma"]))
    return {"V": v, "rate": 1.0 / v}, None, f"V(p) = {v:.12g}   inaccuracy rate = {1.0 / v:.12g}"


RUNNERS = {
    "estimate": run_estimate,
    "mixture": run_mixture,
    "mle": run_mle,
    "simulate variance-sweep": run_variance_sweep,
    "simulate tables": run_tables,
    "simulate coverage": run_coverage,
    "simulate unbiasedness": run_unbiasedness,
    "simulate prs": run_prs,
    "theory": run_theory,
}


# -- argument parsing ------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", metavar="PATH", help="write a JSON run record")


def _add_sim_common(p: argparse.ArgumentParser, reps: int) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $POWMEAN_SEED or 0)")
    p.add_argument("--reps", type=_count, default=reps)
    p.add_argument("--workers", type=int, default=1, help="threads; results do not depend on it")
    _add_output(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="power-mean estimate of gamma from a sample file")
    p.add_argument("input")
    p.add_argument("--p", type=_fraction, default=-1.0)
    p.add_argument("--alpha", default="i")
    p.add_argument("--disc", type=_fraction, metavar="A", help="also print the 1-A confidence disc")
    _add_output(p)

    p = sub.add_parser("mixture", help="closed-form mixture Cauchy estimate")
    p.add_argument("input")
    p.add_argument("--alpha-exp", type=_fraction, default=0.1)
    _add_output(p)

    p = sub.add_parser("mle", help="Cauchy MLE by fixed-point iteration")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--start", default="i")
    _add_output(p)

    p = sub.add_parser("theory", help="asymptotic variance V(p) by quadrature")
    p.add_argument("--p", type=_fraction, default=-1.0)
    p.add_argument("--alpha", default="i")
    p.add_argument("--gamma", default="i")
    _add_output(p)

    p = sub.add_parser("replay", help="re-execute a JSON run record and compare results")
    p.add_argument("record")
    p.add_argument("--workers", type=int, default=1)

    sim = sub.add_parser("simulate", help="Monte Carlo experiments")
    ssub = sim.add_subparsers(dest="experiment", required=True)

    s = ssub.add_parser("variance-sweep")
    s.add_argument("--p", type=_float_list, default=[-1.0])
    s.add_argument("--alpha", default="i")
    s.add_argument("--gamma", default="i")
    s.add_argument("--n", type=_count, default=10_000)
    s.add_argument("--tol", type=float, default=0.05)
    _add_sim_common(s, 1000)

    s = ssub.add_parser("tables")
    s.add_argument("--which", choices=["1", "2", "both"], default="both")
    s.add_argument("--n-list", type=_int_list, default=list(TABLE_N))
    s.add_argument("--t-list", type=_float_list, default=list(TABLE_T))
    s.add_argument("--alpha-exp", type=_fraction, default=0.1)
    s.add_argument("--tol", type=float, default=0.25)
    _add_sim_common(s, 1000)

    s = ssub.add_parser("coverage")
    s.add_argument("--p", type=_fraction, default=-1.0)
    s.add_argument("--alpha", default="i")
    s.add_argument("--gamma", default="i")
    s.add_argument("--n", type=_count, default=1000)
    s.add_argument("--a", type=_fraction, default=0.05)
    s.add_argument("--tol", type=float, default=0.01)
    _add_sim_common(s, 1000)

    s = ssub.add_parser("unbiasedness")
    s.add_argument("--estimator", choices=["qam", "truncated", "sop", "mle"], default="qam")
    s.add_argument("--p", type=_fraction, default=-0.5)
    s.add_argument("--alpha", default="0")
    s.add_argument("--gamma", default="i")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--n", type=_count, default=2)
    s.add_argument("--threshold", type=float, default=4.0)
    _add_sim_common(s, 10_000)

    s = ssub.add_parser("prs")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--alpha", default="i")
    s.add_argument("--gamma", default="i")
    s.add_argument("--n", type=_count, default=50)
    _add_sim_common(s, 1000)
    return parser


_SKIP = {"command", "experiment", "json", "workers", "record"}


def _config_from_args(args: argparse.Namespace) -> tuple[str, dict]:
    command = args.command if args.command != "simulate" else f"simulate {args.experiment}"
    cfg = {k.replace("-", "_"): v for k, v in vars(args).items() if k not in _SKIP}
    if "seed" in cfg and cfg["seed"] is None:
        cfg["seed"] = _default_seed()
    for key in ("alpha", "gamma", "start"):
        if key in cfg:
            cfg[key] = format_complex(parse_complex(cfg[key]), 17)
    return command, cfg


def _error_exit(exc: BaseException) -> int:
    print(f"error: {exc}", file=sys.stderr)
    if isinstance(exc, RegimeError):
        return EXIT_REGIME
    if isinstance(exc, NonConvergenceError):
        return EXIT_NONCONVERGENCE
    return EXIT_VALIDATION


def _replay(path: str, workers: int) -> int:
    record = RunRecord.read(path)
    runner = RUNNERS.get(record.command)
    if runner is None:
        print(f"error: unknown command {record.command!r} in record", file=sys.stderr)
        return EXIT_VALIDATION
    results, _, _ = runner(record.config, workers)
    same = json.dumps(to_jsonable(results), sort_keys=True) == json.dumps(record.results, sort_keys=True)
    print("replay reproduces the recorded results" if same else "replay DIFFERS from the recorded results")
    return EXIT_OK if same else EXIT_FAILED_CHECK


def _attach_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-1/4" or "-1,-0.5" as an option flag; glue them to the preceding option
    out: list[str] = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        if args.command == "replay":
            return _replay(args.record, args.workers)
        command, cfg = _config_from_args(args)
        results, passed, text = RUNNERS[command](cfg, getattr(args, "workers", 1))
    except (PowmeanError, OSError) as exc:
        return _error_exit(exc)
    print(text)
    if args.json:
        RunRecord.create(command, cfg, results, cfg.get("seed")).write(args.json)
    if command == "mle" and not passed:
        return EXIT_NONCONVERGENCE
    if command.startswith("simulate") and passed is False:
        return EXIT_FAILED_CHECK
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
