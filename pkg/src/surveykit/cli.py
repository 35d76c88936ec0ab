"""Command-line front end.

Subcommands: ``params`` (population parameter report), ``members``
(family-member PRE tables over named parameter atoms), ``weights`` (solve the
bias-annihilating weight system), ``verify`` (analytic vs exact/Monte Carlo
comparison report), ``generate`` (synthetic population to CSV).

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical degeneracy,
4 verification failure.  Tables print numbers with 6 significant digits;
JSON carries full precision.  The environment variable ``SURVEYKIT_SEED``
supplies the default seed.  A JSON config file (``--config``) may hold any
long-option value (keys use underscores, e.g. ``n_prime``, ``tol_mse``);
command-line flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from itertools import product

from .errors import (
    DegenerateDenominator,
    EmptyGrid,
    NonPositiveBase,
    SurveyKitError,
    ZeroMse,
)
from .estimators import (
    ATOM_NAMES,
    FamilyConfig,
    est_exp_ratio,
    est_mean,
    est_ratio,
    est_regression,
    est_t1,
    est_t1d,
    est_t2,
    est_t2d,
    est_tp,
    est_tpd,
)
from .population import (
    SyntheticSpec,
    compute_moments,
    finite_factors,
    generate_synthetic,
    load_population,
    save_population,
)
from .theory import (
    BiasMse,
    TheoryInput,
    mse_mean,
    min_mse_tp,
    min_mse_tpd,
    pre_percent,
    theory_classical_ratio,
    theory_exp_ratio,
    theory_t1,
    theory_t1d,
    theory_t2,
    theory_t2d,
    theory_tp,
    theory_tpd,
)
from .verify import (
    VerificationReport,
    compare,
    enumerate_srswor,
    enumerate_two_phase,
    monte_carlo,
)
from .weights import solve_weights, solve_weights_two_phase

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

_SINGLE_PHASE_ESTIMATORS = ("mean", "ratio", "exp", "reg", "t1", "t2", "tp")
_TWO_PHASE_ESTIMATORS = ("mean", "t1d", "t2d", "tpd")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit(2) on usage errors."""

    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class GridSpec:
    """Atom grids for the family-member PRE tables.

    Rows are the cross product of the K1/K3 atom lists (K4/K5 for the t2
    family), deduplicated in first-appearance order; columns come from the
    exponent lists crossed with the K2 signs.
    """

    k1_atoms: tuple[str, ...]
    k3_atoms: tuple[str, ...]
    k4_atoms: tuple[str, ...]
    k5_atoms: tuple[str, ...]
    k2_values: tuple[int, ...] = (1, -1)
    alpha: tuple[float, ...] = (1.0,)
    beta: tuple[float, ...] = (-1.0,)
    lam: tuple[float, ...] = (-1.0,)

    def __post_init__(self):
        for name in (*self.k1_atoms, *self.k3_atoms, *self.k4_atoms, *self.k5_atoms):
            if name not in ATOM_NAMES:
                raise ValueError(f"unknown parameter atom {name!r}; expected one of {ATOM_NAMES}")
        if not all(v in (1, -1) for v in self.k2_values):
            raise ValueError("k2_values must be drawn from {+1, -1}")
        if not (self.k2_values and self.alpha and self.beta and self.lam):
            raise EmptyGrid("k2_values and exponent lists must be non-empty")


_DEFAULT_GRID = GridSpec(
    k1_atoms=("unity", "beta2_x", "C_x", "N_Xbar", "N", "n"),
    k3_atoms=("C_x", "beta2_x", "rho_yx", "S_x", "f", "g", "K_x", "unity", "Xbar"),
    k4_atoms=("unity", "beta2_x", "C_x", "N_Xbar", "N", "n"),
    k5_atoms=("C_x", "beta2_x", "rho_yx", "S_x", "f", "g", "K_x", "unity", "Xbar"),
)

_DEGENERATE_CELL = "n/a(degenerate)"


# --- argument plumbing -------------------------------------------------------


def _add_population_args(p: _Parser) -> None:
    p.add_argument("--pop", help="population CSV path (header must contain y and x)")
    p.add_argument("--synthetic", help="synthetic spec: inline JSON or a path to a JSON file")


def _add_design_args(p: _Parser) -> None:
    p.add_argument("--n", type=int, help="second-phase / single-phase sample size")
    p.add_argument("--n-prime", dest="n_prime", type=int, help="first-phase sample size (two-phase)")


def _add_config_args(p: _Parser) -> None:
    p.add_argument("--alpha", type=float, help="t1 exponent")
    p.add_argument("--beta", type=float, help="t2 power exponent")
    p.add_argument("--lambda", dest="lam", type=float, help="t2 exponential coefficient")
    p.add_argument("--m", type=float, help="two-phase t1d exponent (defaults to alpha)")
    p.add_argument("--q", type=float, help="two-phase t2d power exponent (defaults to beta)")
    p.add_argument("--gamma", type=float, help="two-phase t2d exponential coefficient (defaults to lambda)")
    for k in ("k1", "k2", "k3", "k4", "k5"):
        p.add_argument(f"--{k}", help=f"{k.upper()} constant: atom name or numeric literal")


def _add_output_args(p: _Parser) -> None:
    p.add_argument("--format", choices=("csv", "markdown", "json"), help="output format (default csv)")
    p.add_argument("--out", help="write output to this path instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="surveykit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON config file; command-line flags win")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("params", help="print population parameters and design factors")
    _add_population_args(p)
    _add_design_args(p)
    _add_output_args(p)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("members", help="family-member PRE table over parameter-atom grids")
    _add_population_args(p)
    _add_design_args(p)
    _add_output_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--family", choices=("t1", "t2"), help="which family to tabulate (default t1)")
    p.add_argument("--grid", help="grid spec: inline JSON or a path to a JSON file (default built-in)")
    p.add_argument("--alpha", help="comma-separated t1 exponents (default 1)")
    p.add_argument("--beta", help="comma-separated t2 power exponents (default -1)")
    p.add_argument("--lambda", dest="lam", help="comma-separated t2 exponential coefficients (default -1)")
    p.set_defaults(func=cmd_members)

    p = sub.add_parser("weights", help="solve the bias-annihilating weight system")
    _add_population_args(p)
    _add_design_args(p)
    _add_config_args(p)
    _add_output_args(p)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("verify", help="compare analytic theory against exact or Monte Carlo truth")
    _add_population_args(p)
    _add_design_args(p)
    _add_config_args(p)
    _add_output_args(p)
    p.add_argument("--mode", choices=("analytic", "enumerate", "mc"), help="truth source (default enumerate)")
    p.add_argument("--estimators", help="comma-separated estimator names")
    p.add_argument("--reps", type=int, help="Monte Carlo replicates (default 10000)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (default env SURVEYKIT_SEED)")
    p.add_argument("--tol-bias", dest="tol_bias", type=float,
                   help="absolute bias tolerance (default 0.5*|bias| + 0.05*sqrt(MSE) per row)")
    p.add_argument("--tol-mse", dest="tol_mse", type=float, help="relative MSE tolerance (default 0.15)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="generate a synthetic population CSV")
    p.add_argument("--synthetic", help="synthetic spec: inline JSON or a path to a JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_generate)

    return parser


def _load_json_arg(value: str) -> dict:
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    text = value
    if not value.lstrip().startswith("{"):
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
    d = json.loads(text)
    if not isinstance(d, dict):
        raise ValueError(f"expected a JSON object, got {type(d).__name__}")
    return d


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    alias = {"lambda": "lam"}
    for key, value in cfg.items():
        attr = alias.get(key, key)
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def _default_seed(args: argparse.Namespace) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SURVEYKIT_SEED")
    return int(env) if env else None


def _get_population(args: argparse.Namespace):
    """Return (population, source-description dict)."""
    if getattr(args, "pop", None):
        return load_population(args.pop), {"path": args.pop}
    if getattr(args, "synthetic", None):
        spec_dict = args.synthetic if isinstance(args.synthetic, dict) else _load_json_arg(args.synthetic)
        if "seed" not in spec_dict:
            seed = _default_seed(args)
            spec_dict = {**spec_dict, "seed": seed if seed is not None else 0}
        spec = SyntheticSpec(**spec_dict)
        return generate_synthetic(spec), {"synthetic": spec.__dict__.copy()}
    raise _UsageError("a population is required: give --pop or --synthetic")


def _parse_k(value):
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        pass
    if value not in ATOM_NAMES:
        raise ValueError(f"unknown parameter atom {value!r}; expected a number or one of {ATOM_NAMES}")
    return value


def _resolve_family_config(args, moments, factors) -> FamilyConfig:
    kw = {}
    for name in ("k1", "k2", "k3", "k4", "k5"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = int(v) if name == "k2" else _parse_k(v)
    for name in ("alpha", "beta", "lam", "m", "q", "gamma"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = float(v)
    return FamilyConfig.resolve(moments, factors, **kw)


# --- output helpers -----------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(headers: list[str], rows: list[list], fmt: str, out: str | None) -> None:
    if fmt == "json":
        payload = [dict(zip(headers, row)) for row in rows]
        _write_out(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)
        return
    cells = [[_fmt(v) if v is not None else "" for v in row] for row in rows]
    if fmt == "markdown":
        lines = ["| " + " | ".join(headers) + " |", "| " + " | ".join("---" for _ in headers) + " |"]
        lines += ["| " + " | ".join(row) + " |" for row in cells]
        _write_out("\n".join(lines) + "\n", out)
        return
    lines = [",".join(headers)]
    lines += [",".join(row) for row in cells]
    _write_out("\n".join(lines) + "\n", out)


# --- subcommands ---------------------------------------------------------------


def cmd_params(args) -> int:
    pop, _ = _get_population(args)
    if args.n is None:
        raise _UsageError("params requires --n")
    moments = compute_moments(pop)
    factors = finite_factors(pop.N, args.n, args.n_prime)
    pairs: list[tuple[str, object]] = [
        ("N", moments.N),
        ("n", factors.n),
    ]
    if factors.n_prime is not None:
        pairs.append(("n_prime", factors.n_prime))
    pairs += [
        ("Ybar", moments.Ybar),
        ("Xbar", moments.Xbar),
        ("S_y", math.sqrt(moments.Sy2)),
        ("S_x", math.sqrt(moments.Sx2)),
        ("C_y", moments.Cy),
        ("C_x", moments.Cx),
        ("rho_yx", moments.rho),
        ("K_x", moments.Kx),
        ("beta2_x", moments.beta2x),
        ("f", factors.f),
        ("g", factors.g),
        ("f1", factors.f1),
    ]
    if factors.n_prime is not None:
        pairs += [("f2", factors.f2), ("f3", factors.f3)]
    fmt = args.format or "csv"
    if fmt == "json":
        _write_out(json.dumps(dict(pairs), indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit_table(["parameter", "value"], [[k, v] for k, v in pairs], fmt, args.out)
    return EXIT_OK


def _parse_float_list(value, fallback: tuple[float, ...]) -> tuple[float, ...]:
    if value is None:
        return fallback
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(float(v) for v in str(value).split(","))


def _grid_from_args(args) -> GridSpec:
    base = _DEFAULT_GRID
    if getattr(args, "grid", None):
        d = args.grid if isinstance(args.grid, dict) else _load_json_arg(args.grid)
        kw = {
            "k1_atoms": tuple(d.get("k1_atoms", base.k1_atoms)),
            "k3_atoms": tuple(d.get("k3_atoms", base.k3_atoms)),
            "k4_atoms": tuple(d.get("k4_atoms", base.k4_atoms)),
            "k5_atoms": tuple(d.get("k5_atoms", base.k5_atoms)),
            "k2_values": tuple(int(v) for v in d.get("k2_values", base.k2_values)),
            "alpha": tuple(float(v) for v in d.get("alpha", base.alpha)),
            "beta": tuple(float(v) for v in d.get("beta", base.beta)),
            "lam": tuple(float(v) for v in d.get("lambda", d.get("lam", base.lam))),
        }
        base = GridSpec(**kw)
    return GridSpec(
        k1_atoms=base.k1_atoms,
        k3_atoms=base.k3_atoms,
        k4_atoms=base.k4_atoms,
        k5_atoms=base.k5_atoms,
        k2_values=base.k2_values,
        alpha=_parse_float_list(getattr(args, "alpha", None), base.alpha),
        beta=_parse_float_list(getattr(args, "beta", None), base.beta),
        lam=_parse_float_list(getattr(args, "lam", None), base.lam),
    )


def _dedup(pairs):
    seen = set()
    ordered = []
    for p in pairs:
        if p not in seen:
            seen.add(p)
            ordered.append(p)
    return ordered


def cmd_members(args) -> int:
    pop, _ = _get_population(args)
    if args.n is None:
        raise _UsageError("members requires --n (atoms f and g need the design)")
    moments = compute_moments(pop)
    factors = finite_factors(pop.N, args.n, args.n_prime)
    grid = _grid_from_args(args)
    family = args.family or "t1"
    base = mse_mean(moments, factors)
    ti_cache = {}

    def pre_cell(**resolve_kw):
        try:
            cfg = FamilyConfig.resolve(moments, factors, **resolve_kw)
            key = (cfg.K1, cfg.K2, cfg.K3, cfg.K4, cfg.K5, cfg.alpha, cfg.beta, cfg.lam)
            if key not in ti_cache:
                ti = TheoryInput.build(moments, factors, cfg)
                bm = theory_t1(ti) if family == "t1" else theory_t2(ti)
                ti_cache[key] = pre_percent(base, bm.mse)
            return ti_cache[key]
        except (DegenerateDenominator, NonPositiveBase, ZeroMse):
            return None

    if family == "t1":
        row_pairs = _dedup(product(grid.k1_atoms, grid.k3_atoms))
        col_keys = [(a, k2) for a in grid.alpha for k2 in grid.k2_values]
        headers = ["k1", "k3"] + [f"PRE[alpha={a:g};K2={k2:+d}]" for a, k2 in col_keys]
        rows = []
        for a1, a3 in row_pairs:
            cells = [pre_cell(k1=a1, k2=k2, k3=a3, alpha=a) for a, k2 in col_keys]
            rows.append([a1, a3] + cells)
    else:
        row_pairs = _dedup(product(grid.k4_atoms, grid.k5_atoms))
        col_keys = [(b, l) for b in grid.beta for l in grid.lam]
        headers = ["k4", "k5"] + [f"PRE[beta={b:g};lambda={l:g}]" for b, l in col_keys]
        rows = []
        for a4, a5 in row_pairs:
            cells = [pre_cell(k4=a4, k5=a5, beta=b, lam=l) for b, l in col_keys]
            rows.append([a4, a5] + cells)

    if not rows or not col_keys:
        raise EmptyGrid("the member grid produced no rows or no columns")

    fmt = args.format or "csv"
    if fmt == "json":
        row_keys = headers[:2]
        payload = {
            "family": family,
            "n": factors.n,
            "columns": headers[2:],
            "rows": [
                {row_keys[0]: r[0], row_keys[1]: r[1], "cells": dict(zip(headers[2:], r[2:]))}
                for r in rows
            ],
        }
        _write_out(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        display = [
            [r[0], r[1]] + [(_DEGENERATE_CELL if c is None else c) for c in r[2:]] for r in rows
        ]
        _emit_table(headers, display, fmt, args.out)
    return EXIT_OK


def cmd_weights(args) -> int:
    pop, _ = _get_population(args)
    if args.n is None:
        raise _UsageError("weights requires --n")
    moments = compute_moments(pop)
    factors = finite_factors(pop.N, args.n, args.n_prime)
    cfg = _resolve_family_config(args, moments, factors)
    ti = TheoryInput.build(moments, factors, cfg)
    two_phase = args.n_prime is not None
    if two_phase:
        sol = solve_weights_two_phase(ti)
        bm = theory_tpd(ti, sol)
        floor = min_mse_tpd(moments, factors)
        labels = ("h0", "h1", "h2")
    else:
        sol = solve_weights(ti)
        bm = theory_tp(ti, sol)
        floor = min_mse_tp(moments, factors)
        labels = ("w0", "w1", "w2")
    base = mse_mean(moments, factors)
    pairs: list[tuple[str, object]] = list(zip(labels, sol.w))
    pairs += [
        ("residual_sum", sol.residual_sum),
        ("residual_opt", sol.residual_opt),
        ("residual_bias", sol.residual_bias),
        ("condition_estimate", sol.condition_estimate),
        ("analytic_bias", bm.bias),
        ("analytic_mse", bm.mse),
        ("min_mse", floor),
        ("pre", pre_percent(base, bm.mse) if bm.mse > 0 else None),
    ]
    fmt = args.format or "csv"
    if fmt == "json":
        _write_out(json.dumps(dict(pairs), indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit_table(["quantity", "value"], [[k, v] for k, v in pairs], fmt, args.out)
    return EXIT_OK


def _auto_tol_bias(bm: BiasMse) -> float:
    # Single-run default band: generous on the first-order bias, floored by
    # a sliver of the estimator's spread.
    return 0.5 * abs(bm.bias) + 0.05 * math.sqrt(max(bm.mse, 0.0))


def cmd_verify(args) -> int:
    pop, source = _get_population(args)
    if args.n is None:
        raise _UsageError("verify requires --n")
    mode = args.mode or "enumerate"
    moments = compute_moments(pop)
    factors = finite_factors(pop.N, args.n, args.n_prime)
    cfg = _resolve_family_config(args, moments, factors)
    ti = TheoryInput.build(moments, factors, cfg)
    two_phase = args.n_prime is not None
    if two_phase and mode == "mc":
        raise _UsageError("two-phase verification supports --mode analytic or enumerate")
    if mode == "mc":
        seed = _default_seed(args)
        if seed is None:
            raise _UsageError("--mode mc requires --seed (or SURVEYKIT_SEED)")
        reps = args.reps if args.reps is not None else 10_000
    else:
        seed, reps = None, None

    names = list(_TWO_PHASE_ESTIMATORS if two_phase else _SINGLE_PHASE_ESTIMATORS)
    if args.estimators:
        names = [s.strip() for s in str(args.estimators).split(",") if s.strip()]
    known = _TWO_PHASE_ESTIMATORS if two_phase else _SINGLE_PHASE_ESTIMATORS
    for name in names:
        if name not in known:
            raise _UsageError(f"unknown estimator {name!r}; choose from {', '.join(known)}")

    xbar = moments.Xbar
    slope = moments.Syx / moments.Sx2
    base_analytic = mse_mean(moments, factors)
    sol = None
    meta: dict = {
        "population": source,
        "N": pop.N,
        "n": args.n,
        "n_prime": args.n_prime,
        "mode": mode,
        "seed": seed,
        "reps": reps,
        "estimators": names,
        "config": {
            "K1": cfg.K1, "K2": cfg.K2, "K3": cfg.K3, "K4": cfg.K4, "K5": cfg.K5,
            "alpha": cfg.alpha, "beta": cfg.beta, "lambda": cfg.lam,
            "m": cfg.m, "q": cfg.q, "gamma": cfg.gamma,
        },
        "tol_mse": args.tol_mse if args.tol_mse is not None else 0.15,
        "tol_bias": args.tol_bias,
    }

    if two_phase:
        analytic_map = {
            "mean": lambda: BiasMse(0.0, base_analytic),
            "t1d": lambda: theory_t1d(ti),
            "t2d": lambda: theory_t2d(ti),
            "tpd": lambda: theory_tpd(ti, sol),
        }
        closures = {
            "mean": lambda s: est_mean(s.second_phase),
            "t1d": lambda s: est_t1d(s, cfg),
            "t2d": lambda s: est_t2d(s, cfg),
            "tpd": lambda s: est_tpd(s, cfg, sol),
        }
        if "tpd" in names:
            sol = solve_weights_two_phase(ti)
    else:
        analytic_map = {
            "mean": lambda: BiasMse(0.0, base_analytic),
            "ratio": lambda: theory_classical_ratio(moments, factors),
            "exp": lambda: theory_exp_ratio(moments, factors),
            "reg": lambda: BiasMse(0.0, min_mse_tp(moments, factors)),
            "t1": lambda: theory_t1(ti),
            "t2": lambda: theory_t2(ti),
            "tp": lambda: theory_tp(ti, sol),
        }
        closures = {
            "mean": est_mean,
            "ratio": lambda s: est_ratio(s, xbar),
            "exp": lambda s: est_exp_ratio(s, xbar),
            "reg": lambda s: est_regression(s, xbar, slope),
            "t1": lambda s: est_t1(s, xbar, cfg),
            "t2": lambda s: est_t2(s, xbar, cfg),
            "tp": lambda s: est_tp(s, xbar, cfg, sol),
        }
        if "tp" in names:
            sol = solve_weights(ti)
    if sol is not None:
        meta["weights"] = list(sol.w)

    fmt = args.format or "csv"

    if mode == "analytic":
        headers = ["estimator", "analytic_bias", "analytic_mse", "pre_analytic"]
        rows = []
        for name in names:
            bm = analytic_map[name]()
            pre = pre_percent(base_analytic, bm.mse) if bm.mse > 0 else None
            rows.append([name, bm.bias, bm.mse, pre])
        if fmt == "json":
            payload = {"meta": meta, "rows": [dict(zip(headers, r)) for r in rows]}
            _write_out(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
        else:
            _emit_table(headers, rows, fmt, args.out)
        return EXIT_OK

    def truth_of(name: str):
        if two_phase:
            return enumerate_two_phase(pop, args.n_prime, args.n, closures[name], name)
        if mode == "enumerate":
            return enumerate_srswor(pop, args.n, closures[name], name)
        return monte_carlo(pop, args.n, closures[name], reps, seed, name)

    # Sample-mean truth anchors the empirical PRE column.
    mean_truth = truth_of("mean")
    base_truth = mean_truth.exact_mse if mode == "enumerate" else mean_truth.emp_mse
    tol_mse = meta["tol_mse"]
    rows = []
    for name in names:
        bm = analytic_map[name]()
        truth = mean_truth if name == "mean" else truth_of(name)
        tol_bias = args.tol_bias if args.tol_bias is not None else _auto_tol_bias(bm)
        rows.append(
            compare(
                bm, truth, tol_bias, tol_mse,
                estimator_id=name,
                base_mse_analytic=base_analytic,
                base_mse_truth=base_truth,
            )
        )
    report = VerificationReport(rows=tuple(rows), meta=meta)

    if fmt == "json":
        _write_out(emit_report_json(report), args.out)
    else:
        headers = [
            "estimator", "mode", "analytic_bias", "analytic_mse", "truth_bias", "truth_mse",
            "bias_gap", "mse_gap", "pre_analytic", "pre_truth", "passed",
        ]
        table = [
            [
                r.estimator_id, r.mode, r.analytic_bias, r.analytic_mse, r.truth_bias,
                r.truth_mse, r.bias_gap, r.mse_gap, r.pre_analytic, r.pre_truth, r.passed,
            ]
            for r in report.rows
        ]
        _emit_table(headers, table, fmt, args.out)
    return EXIT_OK if report.all_pass else EXIT_VERIFY


def emit_report_json(report: VerificationReport) -> str:
    """Serialize a verification report; parse_report_json inverts this exactly."""
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def parse_report_json(text: str) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(text))


def cmd_generate(args) -> int:
    if not getattr(args, "synthetic", None):
        raise _UsageError("generate requires --synthetic")
    pop, _ = _get_population(args)
    if args.out:
        save_population(pop, args.out)
    else:
        save_population(pop, sys.stdout)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise _UsageError("a subcommand is required (params, members, weights, verify, generate)")
        _apply_config_file(args)
        return args.func(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SurveyKitError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"error: file not found: {e.filename or e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
