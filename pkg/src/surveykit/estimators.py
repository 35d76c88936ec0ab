"""Point estimators of the population mean.

Classical baselines (sample mean, ratio, exponential-ratio, regression), the
two tunable families

    t1 = ybar * ((K1*Xbar + K2*K3) / (K1*xbar + K2*K3)) ** alpha
    t2 = ybar * (2 - (xbar/Xbar)**beta * exp(lambda * (d_X - d_x)/(d_X + d_x)))
         with d_X = K4*Xbar + K5, d_x = K4*xbar + K5

their convex combination tp = w0*ybar + w1*t1 + w2*t2 (weights summing to 1),
and the two-phase analogues t1d/t2d/tpd that replace the known mean Xbar by
the first-phase mean xbar'.

All functions are pure over immutable inputs and safe for concurrent use.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from .errors import (
    DegenerateDenominator,
    NonPositiveBase,
    WeightsNotNormalized,
    ZeroSampleMeanX,
)
from .population import FiniteFactors, PopulationMoments

_WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Sample:
    """An SRSWOR sample of (y, x) pairs."""

    units: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.units) < 2:
            raise ValueError("a sample needs at least 2 units")
        for y, x in self.units:
            if not (math.isfinite(y) and math.isfinite(x)):
                raise ValueError(f"non-finite sample unit ({y}, {x})")

    @property
    def n(self) -> int:
        return len(self.units)

    @cached_property
    def ybar(self) -> float:
        return math.fsum(u[0] for u in self.units) / len(self.units)

    @cached_property
    def xbar(self) -> float:
        return math.fsum(u[1] for u in self.units) / len(self.units)


@dataclass(frozen=True)
class TwoPhaseSample:
    """A nested two-phase sample.

    ``first_phase_x`` holds the n' auxiliary values of the first phase; the
    second phase measures both variables on a subset of those units, so its
    x values must be a sub-multiset of the first phase.
    """

    first_phase_x: tuple[float, ...]
    second_phase: Sample

    def __post_init__(self):
        if self.second_phase.n > len(self.first_phase_x):
            raise ValueError("second phase larger than first phase")
        leftover = Counter(u[1] for u in self.second_phase.units) - Counter(self.first_phase_x)
        if leftover:
            raise ValueError(f"second-phase x values {sorted(leftover)} missing from first phase")

    @property
    def n(self) -> int:
        return self.second_phase.n

    @property
    def n_prime(self) -> int:
        return len(self.first_phase_x)

    @cached_property
    def xbar_prime(self) -> float:
        return math.fsum(self.first_phase_x) / len(self.first_phase_x)


# --- tuning constants ------------------------------------------------------

#: Named population-parameter atoms usable for the K constants.
ATOM_NAMES = (
    "unity",
    "C_x",
    "beta2_x",
    "rho_yx",
    "S_x",
    "f",
    "g",
    "K_x",
    "N",
    "n",
    "Xbar",
    "N_Xbar",
)


def resolve_atom(name: str, moments: PopulationMoments, factors: FiniteFactors) -> float:
    """Evaluate a named population-parameter atom against a design."""
    if name == "unity":
        return 1.0
    if name == "C_x":
        return moments.Cx
    if name == "beta2_x":
        return moments.beta2x
    if name == "rho_yx":
        return moments.rho
    if name == "S_x":
        return math.sqrt(moments.Sx2)
    if name == "f":
        return factors.f
    if name == "g":
        return factors.g
    if name == "K_x":
        return moments.Kx
    if name == "N":
        return float(moments.N)
    if name == "n":
        return float(factors.n)
    if name == "Xbar":
        return moments.Xbar
    if name == "N_Xbar":
        return float(moments.N) * moments.Xbar
    raise ValueError(f"unknown parameter atom {name!r}; expected one of {ATOM_NAMES}")


@dataclass(frozen=True)
class FamilyConfig:
    """Tuning constants of the estimator families.

    K1/K3/K4/K5 are real constants (atom names are resolved to numbers before
    construction, see :meth:`resolve`); K2 is restricted to +1 or -1.  The
    exponents alpha/beta/lam drive the single-phase families; m/q/gamma are
    their two-phase counterparts and default to the single-phase values.
    """

    K1: float = 1.0
    K2: int = 1
    K3: float = 0.0
    K4: float = 1.0
    K5: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    lam: float = 0.0
    m: float | None = None
    q: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.K2 not in (1, -1):
            raise ValueError(f"K2 must be +1 or -1, got {self.K2}")
        if self.m is None:
            object.__setattr__(self, "m", self.alpha)
        if self.q is None:
            object.__setattr__(self, "q", self.beta)
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.lam)

    @classmethod
    def resolve(
        cls,
        moments: PopulationMoments,
        factors: FiniteFactors,
        *,
        k1: float | str = 1.0,
        k2: int = 1,
        k3: float | str = 0.0,
        k4: float | str = 1.0,
        k5: float | str = 0.0,
        alpha: float = 1.0,
        beta: float = 1.0,
        lam: float = 0.0,
        m: float | None = None,
        q: float | None = None,
        gamma: float | None = None,
    ) -> "FamilyConfig":
        """Resolve atom names to numbers and validate denominators against Xbar.

        Atoms are evaluated once, here, and frozen into the config.
        """

        def val(v):
            return resolve_atom(v, moments, factors) if isinstance(v, str) else float(v)

        cfg = cls(
            K1=val(k1), K2=int(k2), K3=val(k3), K4=val(k4), K5=val(k5),
            alpha=alpha, beta=beta, lam=lam, m=m, q=q, gamma=gamma,
        )
        _check_denominators(cfg, moments.Xbar)
        return cfg


def _check_denominators(cfg: FamilyConfig, Xbar: float) -> None:
    d1 = cfg.K1 * Xbar + cfg.K2 * cfg.K3
    if abs(d1) <= 1e-12 * (abs(cfg.K1 * Xbar) + abs(cfg.K3) + 1e-300):
        raise DegenerateDenominator(f"K1*Xbar + K2*K3 = {d1} vanishes (K1={cfg.K1}, K2={cfg.K2}, K3={cfg.K3})")
    d2 = cfg.K4 * Xbar + cfg.K5
    if abs(d2) <= 1e-12 * (abs(cfg.K4 * Xbar) + abs(cfg.K5) + 1e-300):
        raise DegenerateDenominator(f"K4*Xbar + K5 = {d2} vanishes (K4={cfg.K4}, K5={cfg.K5})")


@dataclass(frozen=True)
class ShapeFactors:
    """First-order shape constants of the families at a given Xbar.

    V1 = K1*Xbar / (K1*Xbar + K2*K3), V2 = K4*Xbar / (K4*Xbar + K5); the
    two-phase factors are R1 = V1 and R2 = V2 / 2.
    """

    V1: float
    V2: float
    R1: float
    R2: float


def shape_factors(cfg: FamilyConfig, Xbar: float) -> ShapeFactors:
    _check_denominators(cfg, Xbar)
    v1 = cfg.K1 * Xbar / (cfg.K1 * Xbar + cfg.K2 * cfg.K3)
    v2 = cfg.K4 * Xbar / (cfg.K4 * Xbar + cfg.K5)
    return ShapeFactors(V1=v1, V2=v2, R1=v1, R2=v2 / 2.0)


# --- shared numeric helpers -------------------------------------------------


def _ratio_power(num: float, den: float, exponent: float, what: str) -> float:
    """(num/den) ** exponent with sign rules for fractional exponents.

    Fractional exponents require both num and den strictly positive; integer
    exponents accept any nonzero values.  Negative exponents invert the ratio
    before exponentiation so that exponent -1 reproduces den/num exactly.
    """
    if exponent == 0:
        return 1.0
    if exponent < 0:
        num, den = den, num
        exponent = -exponent
    if float(exponent).is_integer():
        if num == 0 or den == 0:
            raise NonPositiveBase(f"{what}: zero bracket with integer exponent {exponent}")
        base = num / den
        if exponent == 1:
            return base
        return base ** int(exponent)
    if num <= 0 or den <= 0:
        raise NonPositiveBase(
            f"{what}: fractional exponent {exponent} needs positive brackets, got {num} and {den}"
        )
    return (num / den) ** exponent


def _weights_triple(w) -> tuple[float, float, float]:
    """Accept a WeightSolution-like object or a plain 3-sequence."""
    seq = getattr(w, "w", w)
    w0, w1, w2 = (float(v) for v in seq)
    if abs(w0 + w1 + w2 - 1.0) > _WEIGHT_SUM_TOL:
        raise WeightsNotNormalized(f"weights {(w0, w1, w2)} sum to {w0 + w1 + w2}, expected 1")
    return w0, w1, w2


# --- single-phase estimators -------------------------------------------------


def est_mean(s: Sample) -> float:
    """Sample mean of y."""
    return s.ybar


def est_ratio(s: Sample, Xbar: float) -> float:
    """Classical ratio estimator ybar * Xbar / xbar."""
    if s.xbar == 0:
        raise ZeroSampleMeanX("sample mean of x is zero")
    return s.ybar * (Xbar / s.xbar)


def est_exp_ratio(s: Sample, Xbar: float) -> float:
    """Exponential-ratio estimator ybar * exp((Xbar - xbar) / (Xbar + xbar))."""
    denom = Xbar + s.xbar
    if abs(denom) <= 1e-12 * (abs(Xbar) + abs(s.xbar)):
        raise DegenerateDenominator(f"Xbar + xbar = {denom} vanishes")
    return s.ybar * math.exp((Xbar - s.xbar) / denom)


def est_t1(s: Sample, Xbar: float, cfg: FamilyConfig) -> float:
    """Power-adjusted shifted-ratio family member t1."""
    shift = cfg.K2 * cfg.K3
    return s.ybar * _ratio_power(cfg.K1 * Xbar + shift, cfg.K1 * s.xbar + shift, cfg.alpha, "t1")


def _exp_shift_factor(far: float, near: float, ratio_num: float, ratio_den: float,
                      beta: float, lam: float, what: str) -> float:
    """The braced factor of the t2 family: (ratio)**beta * exp(lam*(far-near)/(far+near))."""
    if far <= 0 or near <= 0:
        raise DegenerateDenominator(f"{what}: shifted terms must be positive, got {far} and {near}")
    power = _ratio_power(ratio_num, ratio_den, beta, what) if beta != 0 else 1.0
    arg = lam * (far - near) / (far + near)
    return power * math.exp(arg)


def est_t2(s: Sample, Xbar: float, cfg: FamilyConfig) -> float:
    """Exponential-difference family member t2."""
    far = cfg.K4 * Xbar + cfg.K5
    near = cfg.K4 * s.xbar + cfg.K5
    return s.ybar * (2.0 - _exp_shift_factor(far, near, s.xbar, Xbar, cfg.beta, cfg.lam, "t2"))


def est_tp(s: Sample, Xbar: float, cfg: FamilyConfig, weights) -> float:
    """Weighted combination w0*mean + w1*t1 + w2*t2 (weights sum to 1).

    Members with weight exactly 0 are not evaluated, so their preconditions
    cannot fail for configurations they do not contribute to.
    """
    w0, w1, w2 = _weights_triple(weights)
    total = 0.0
    if w0 != 0:
        total += w0 * est_mean(s)
    if w1 != 0:
        total += w1 * est_t1(s, Xbar, cfg)
    if w2 != 0:
        total += w2 * est_t2(s, Xbar, cfg)
    return total


def est_regression(s: Sample, Xbar: float, beta_coef: float) -> float:
    """Linear regression estimator ybar + b * (Xbar - xbar) with fixed slope b."""
    return s.ybar + beta_coef * (Xbar - s.xbar)


# --- two-phase estimators ------------------------------------------------------


def est_t1d(s: TwoPhaseSample, cfg: FamilyConfig) -> float:
    """Two-phase t1: the known Xbar is replaced by the first-phase mean."""
    shift = cfg.K2 * cfg.K3
    sp = s.second_phase
    return sp.ybar * _ratio_power(cfg.K1 * s.xbar_prime + shift, cfg.K1 * sp.xbar + shift, cfg.m, "t1d")


def est_t2d(s: TwoPhaseSample, cfg: FamilyConfig) -> float:
    """Two-phase t2: the known Xbar is replaced by the first-phase mean."""
    sp = s.second_phase
    far = cfg.K4 * s.xbar_prime + cfg.K5
    near = cfg.K4 * sp.xbar + cfg.K5
    return sp.ybar * (2.0 - _exp_shift_factor(far, near, sp.xbar, s.xbar_prime, cfg.q, cfg.gamma, "t2d"))


def est_tpd(s: TwoPhaseSample, cfg: FamilyConfig, weights) -> float:
    """Weighted two-phase combination h0*mean + h1*t1d + h2*t2d."""
    h0, h1, h2 = _weights_triple(weights)
    total = 0.0
    if h0 != 0:
        total += h0 * est_mean(s.second_phase)
    if h1 != 0:
        total += h1 * est_t1d(s, cfg)
    if h2 != 0:
        total += h2 * est_t2d(s, cfg)
    return total
