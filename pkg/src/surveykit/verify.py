"""Ground-truth engines: exhaustive SRSWOR enumeration and seeded Monte Carlo.

The first-order formulas in :mod:`surveykit.theory` are approximations; this
module computes what actually happens on a concrete population, either
exactly (every subset, equal probability) or empirically (reproducible
simulation), and compares the two.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import EstimatorError, SurveyKitError, TooManySubsets
from .estimators import FamilyConfig, Sample, TwoPhaseSample, est_t1, est_tp
from .population import FinitePopulation, compute_moments, finite_factors
from .theory import BiasMse, TheoryInput
from .weights import WeightSolution, solve_weights

#: Hard ceiling on the number of samples an exhaustive run may visit.
SUBSET_GUARD = 10_000_000


class _CompensatedSum:
    """Neumaier-compensated accumulator; exactness matters across ~1e7 terms."""

    __slots__ = ("_s", "_c")

    def __init__(self):
        self._s = 0.0
        self._c = 0.0

    def add(self, v: float) -> None:
        t = self._s + v
        if abs(self._s) >= abs(v):
            self._c += (self._s - t) + v
        else:
            self._c += (v - t) + self._s
        self._s = t

    @property
    def total(self) -> float:
        return self._s + self._c


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """The exact sampling distribution of an estimator under the design.

    Every admissible sample is visited exactly once and carries probability
    1/sample_count (a rational, so the probabilities sum to 1 exactly).
    ``exact_bias`` is E[t] - Ybar and ``exact_mse`` is E[(t - Ybar)^2], both
    accumulated with compensated summation before the single final division.
    """

    estimator_id: str
    estimates: np.ndarray
    sample_count: int
    exact_bias: float
    exact_mse: float

    @property
    def probability(self) -> Fraction:
        return Fraction(1, self.sample_count)

    @property
    def values(self) -> Iterator[tuple[float, Fraction]]:
        p = self.probability
        return ((float(v), p) for v in self.estimates)


@dataclass(frozen=True)
class EmpiricalStats:
    """Monte Carlo moments of an estimator with their own standard errors."""

    estimator_id: str
    reps: int
    seed: int
    mean_estimate: float
    emp_bias: float
    emp_mse: float
    stderr_bias: float
    stderr_mse: float

    def __post_init__(self):
        if self.reps < 1000:
            raise ValueError(f"Monte Carlo needs reps >= 1000, got {self.reps}")
        if not (math.isfinite(self.stderr_bias) and math.isfinite(self.stderr_mse)):
            raise ValueError("standard errors must be finite")


def _exact_from_estimates(estimator_id: str, values: np.ndarray, ybar: float) -> ExactDistribution:
    dev = _CompensatedSum()
    dev2 = _CompensatedSum()
    for v in values.tolist():
        d = v - ybar
        dev.add(d)
        dev2.add(d * d)
    count = len(values)
    return ExactDistribution(
        estimator_id=estimator_id,
        estimates=values,
        sample_count=count,
        exact_bias=dev.total / count,
        exact_mse=dev2.total / count,
    )


def enumerate_srswor(
    pop: FinitePopulation,
    n: int,
    est: Callable[[Sample], float],
    estimator_id: str = "estimator",
) -> ExactDistribution:
    """Evaluate ``est`` on every n-subset of the population.

    Guarded by :data:`SUBSET_GUARD`; an estimator failure on any subset is
    wrapped in :class:`EstimatorError` carrying the offending index set.
    """
    total = math.comb(pop.N, n)
    if total > SUBSET_GUARD:
        raise TooManySubsets(f"C({pop.N},{n}) = {total} exceeds guard {SUBSET_GUARD}")
    units = pop.units
    ybar = math.fsum(pop.ys) / pop.N
    values = np.empty(total)
    for i, idx in enumerate(combinations(range(pop.N), n)):
        s = Sample(tuple(units[j] for j in idx))
        try:
            values[i] = est(s)
        except (SurveyKitError, ArithmeticError, ValueError) as exc:
            raise EstimatorError(idx, exc) from exc
    return _exact_from_estimates(estimator_id, values, ybar)


def enumerate_two_phase(
    pop: FinitePopulation,
    n_prime: int,
    n: int,
    est: Callable[[TwoPhaseSample], float],
    estimator_id: str = "estimator",
) -> ExactDistribution:
    """Evaluate ``est`` on every nested (first phase, second phase) pair.

    All C(N,n') * C(n',n) pairs are equally probable: SRSWOR at each phase.
    """
    total = math.comb(pop.N, n_prime) * math.comb(n_prime, n)
    if total > SUBSET_GUARD:
        raise TooManySubsets(
            f"C({pop.N},{n_prime}) * C({n_prime},{n}) = {total} exceeds guard {SUBSET_GUARD}"
        )
    units = pop.units
    ybar = math.fsum(pop.ys) / pop.N
    values = np.empty(total)
    i = 0
    for first in combinations(range(pop.N), n_prime):
        fx = tuple(units[j][1] for j in first)
        for sub in combinations(first, n):
            tps = TwoPhaseSample(fx, Sample(tuple(units[j] for j in sub)))
            try:
                values[i] = est(tps)
            except (SurveyKitError, ArithmeticError, ValueError) as exc:
                raise EstimatorError((first, sub), exc) from exc
            i += 1
    return _exact_from_estimates(estimator_id, values, ybar)


def monte_carlo(
    pop: FinitePopulation,
    n: int,
    est: Callable[[Sample], float],
    reps: int,
    seed: int,
    estimator_id: str = "estimator",
    workers: int = 1,
) -> EmpiricalStats:
    """Replicate SRSWOR draws of size n and summarise the estimator.

    Replicate r draws from its own substream seeded by (seed, r), so the
    result is bit-identical for a fixed (seed, reps) no matter how the
    replicates are partitioned across workers.
    """
    if reps < 1000:
        raise ValueError(f"Monte Carlo needs reps >= 1000, got {reps}")
    if n > pop.N:
        raise ValueError(f"sample size {n} exceeds population size {pop.N}")
    units = pop.units
    N = pop.N
    ybar = math.fsum(pop.ys) / N
    values = np.empty(reps)

    def run_chunk(lo: int, hi: int) -> None:
        for r in range(lo, hi):
            rng = np.random.default_rng([seed, r])
            idx = rng.choice(N, size=n, replace=False)
            s = Sample(tuple(units[j] for j in idx))
            try:
                values[r] = est(s)
            except (SurveyKitError, ArithmeticError, ValueError) as exc:
                raise EstimatorError(r, exc) from exc

    if workers <= 1:
        run_chunk(0, reps)
    else:
        step = -(-reps // workers)
        bounds = [(lo, min(lo + step, reps)) for lo in range(0, reps, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [pool.submit(run_chunk, lo, hi) for lo, hi in bounds]:
                fut.result()

    ests = values.tolist()
    mean_estimate = math.fsum(ests) / reps
    emp_bias = mean_estimate - ybar
    sq = [(v - ybar) ** 2 for v in ests]
    emp_mse = math.fsum(sq) / reps
    var_est = math.fsum((v - mean_estimate) ** 2 for v in ests) / (reps - 1)
    mean_sq = emp_mse
    var_sq = math.fsum((s - mean_sq) ** 2 for s in sq) / (reps - 1)
    return EmpiricalStats(
        estimator_id=estimator_id,
        reps=reps,
        seed=seed,
        mean_estimate=mean_estimate,
        emp_bias=emp_bias,
        emp_mse=emp_mse,
        stderr_bias=math.sqrt(var_est / reps),
        stderr_mse=math.sqrt(var_sq / reps),
    )


# --- analytic vs truth comparison --------------------------------------------


@dataclass(frozen=True)
class CompareRow:
    """One verification row: analytic values against an exact/empirical truth.

    The bias check is absolute (|gap| <= tol_bias); the MSE check is relative
    to the analytic value with a tiny absolute floor so that exact zeros on
    degenerate populations are accepted.
    """

    estimator_id: str
    mode: str
    analytic_bias: float
    analytic_mse: float
    truth_bias: float
    truth_mse: float
    bias_gap: float
    mse_gap: float
    tol_bias: float
    tol_mse: float
    bias_pass: bool
    mse_pass: bool
    passed: bool
    pre_analytic: float | None = None
    pre_truth: float | None = None

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator_id,
            "mode": self.mode,
            "analytic_bias": self.analytic_bias,
            "analytic_mse": self.analytic_mse,
            "truth_bias": self.truth_bias,
            "truth_mse": self.truth_mse,
            "bias_gap": self.bias_gap,
            "mse_gap": self.mse_gap,
            "tol_bias": self.tol_bias,
            "tol_mse": self.tol_mse,
            "bias_pass": self.bias_pass,
            "mse_pass": self.mse_pass,
            "passed": self.passed,
            "pre_analytic": self.pre_analytic,
            "pre_truth": self.pre_truth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompareRow":
        return cls(
            estimator_id=d["estimator"],
            mode=d["mode"],
            analytic_bias=d["analytic_bias"],
            analytic_mse=d["analytic_mse"],
            truth_bias=d["truth_bias"],
            truth_mse=d["truth_mse"],
            bias_gap=d["bias_gap"],
            mse_gap=d["mse_gap"],
            tol_bias=d["tol_bias"],
            tol_mse=d["tol_mse"],
            bias_pass=d["bias_pass"],
            mse_pass=d["mse_pass"],
            passed=d["passed"],
            pre_analytic=d["pre_analytic"],
            pre_truth=d["pre_truth"],
        )


@dataclass(frozen=True)
class VerificationReport:
    """A set of comparison rows plus run metadata (JSON-able)."""

    rows: tuple[CompareRow, ...]
    meta: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "rows": [r.to_dict() for r in self.rows],
            "all_pass": self.all_pass,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(rows=tuple(CompareRow.from_dict(r) for r in d["rows"]), meta=d["meta"])


_MSE_ZERO_ATOL = 1e-14


def compare(
    analytic: BiasMse,
    truth: ExactDistribution | EmpiricalStats,
    tol_bias: float,
    tol_mse: float,
    *,
    estimator_id: str | None = None,
    base_mse_analytic: float | None = None,
    base_mse_truth: float | None = None,
) -> CompareRow:
    """Build one pass/fail row from an analytic (bias, MSE) and a truth object.

    tol_bias is absolute; tol_mse is relative to the analytic MSE (with a
    1e-14 absolute floor).  PRE columns are filled when the sample-mean MSE
    baselines are supplied.
    """
    if isinstance(truth, ExactDistribution):
        mode, tb, tm = "exact", truth.exact_bias, truth.exact_mse
    else:
        mode, tb, tm = "mc", truth.emp_bias, truth.emp_mse
    bias_gap = abs(analytic.bias - tb)
    mse_gap = abs(analytic.mse - tm)
    bias_pass = bias_gap <= tol_bias
    mse_pass = mse_gap <= tol_mse * abs(analytic.mse) + _MSE_ZERO_ATOL
    pre_a = pre_t = None
    if base_mse_analytic is not None and analytic.mse > 0:
        pre_a = 100.0 * base_mse_analytic / analytic.mse
    if base_mse_truth is not None and tm > 0:
        pre_t = 100.0 * base_mse_truth / tm
    return CompareRow(
        estimator_id=estimator_id or truth.estimator_id,
        mode=mode,
        analytic_bias=analytic.bias,
        analytic_mse=analytic.mse,
        truth_bias=tb,
        truth_mse=tm,
        bias_gap=bias_gap,
        mse_gap=mse_gap,
        tol_bias=tol_bias,
        tol_mse=tol_mse,
        bias_pass=bias_pass,
        mse_pass=mse_pass,
        passed=bias_pass and mse_pass,
        pre_analytic=pre_a,
        pre_truth=pre_t,
    )


# --- bias annihilation study ---------------------------------------------------


@dataclass(frozen=True)
class AnnihilationEntry:
    n: int
    weights: tuple[float, float, float]
    bias_member: float
    bias_combined: float
    n_bias_member: float
    n_bias_combined: float
    stderr_member: float = 0.0
    stderr_combined: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "weights": list(self.weights),
            "bias_member": self.bias_member,
            "bias_combined": self.bias_combined,
            "n_bias_member": self.n_bias_member,
            "n_bias_combined": self.n_bias_combined,
            "stderr_member": self.stderr_member,
            "stderr_combined": self.stderr_combined,
        }


@dataclass(frozen=True)
class AnnihilationReport:
    """Comparison of n * bias sequences for the member t1 and the combined tp.

    First-order theory predicts n*bias(t1) roughly constant while
    n*bias(tp) shrinks like 1/n; ``passed`` certifies both the magnitude
    ratio bound and the (slack-tolerant) decay of |n*bias(tp)|.
    """

    entries: tuple[AnnihilationEntry, ...]
    max_n_bias_member: float
    max_n_bias_combined: float
    ratio: float
    ratio_bound: float
    monotone_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "max_n_bias_member": self.max_n_bias_member,
            "max_n_bias_combined": self.max_n_bias_combined,
            "ratio": self.ratio,
            "ratio_bound": self.ratio_bound,
            "monotone_ok": self.monotone_ok,
            "passed": self.passed,
        }


def bias_annihilation_check(
    pop: FinitePopulation,
    cfg: FamilyConfig,
    n_grid: Sequence[int],
    mode: str = "exact",
    reps: int | None = None,
    seed: int | None = None,
    ratio_bound: float = 0.2,
    slack: float = 0.1,
    atol: float = 1e-12,
) -> AnnihilationReport:
    """Measure how much of t1's exact bias the solved combination removes.

    For each n the weights are re-solved (f1 changes with n), the exact (or
    Monte Carlo) biases of t1 and tp are computed, and the sequences
    n*bias are reported.  PASS requires
    max_n |n*bias(tp)| <= ratio_bound * max_n |n*bias(t1)| + atol and
    |n*bias(tp)| nonincreasing across the grid up to ``slack`` times its
    maximum (plus 4 standard errors in Monte Carlo mode).
    """
    if len(n_grid) < 3 or list(n_grid) != sorted(set(n_grid)):
        raise ValueError(f"n_grid must be strictly increasing with >= 3 points, got {n_grid!r}")
    if mode not in ("exact", "mc"):
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    if mode == "mc" and (reps is None or seed is None):
        raise ValueError("Monte Carlo mode needs reps and seed")
    moments = compute_moments(pop)
    xbar = moments.Xbar
    entries = []
    for n in n_grid:
        ti = TheoryInput.build(moments, finite_factors(pop.N, n), cfg)
        sol: WeightSolution = solve_weights(ti)
        member = lambda s: est_t1(s, xbar, cfg)  # noqa: E731
        combined = lambda s: est_tp(s, xbar, cfg, sol)  # noqa: E731
        if mode == "exact":
            d1 = enumerate_srswor(pop, n, member, "t1")
            dp = enumerate_srswor(pop, n, combined, "tp")
            b1, bp, se1, sep = d1.exact_bias, dp.exact_bias, 0.0, 0.0
        else:
            e1 = monte_carlo(pop, n, member, reps, seed, "t1")
            ep = monte_carlo(pop, n, combined, reps, seed, "tp")
            b1, bp, se1, sep = e1.emp_bias, ep.emp_bias, e1.stderr_bias, ep.stderr_bias
        entries.append(
            AnnihilationEntry(
                n=n,
                weights=sol.w,
                bias_member=b1,
                bias_combined=bp,
                n_bias_member=n * b1,
                n_bias_combined=n * bp,
                stderr_member=se1,
                stderr_combined=sep,
            )
        )
    max_m = max(abs(e.n_bias_member) for e in entries)
    max_c = max(abs(e.n_bias_combined) for e in entries)
    allowed_rise = slack * max_c
    monotone_ok = all(
        abs(b.n_bias_combined)
        <= abs(a.n_bias_combined) + allowed_rise + 4.0 * b.n * b.stderr_combined + atol
        for a, b in zip(entries, entries[1:])
    )
    ratio = max_c / max_m if max_m > 0 else math.inf
    passed = (max_c <= ratio_bound * max_m + atol) and monotone_ok
    return AnnihilationReport(
        entries=tuple(entries),
        max_n_bias_member=max_m,
        max_n_bias_combined=max_c,
        ratio=ratio,
        ratio_bound=ratio_bound,
        monotone_ok=monotone_ok,
        passed=passed,
    )
