"""Finite-population data model, moments, sampling-fraction factors, synthesis.

The population is the ground truth for everything downstream: moments feed
the analytic theory, and the raw unit values feed the exact-enumeration and
Monte Carlo verification engines.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import (
    DegenerateVariance,
    InvalidSizes,
    MissingColumn,
    NonNumericCell,
    TargetUnreachable,
    TooFewRows,
    ZeroMean,
)

_MIN_UNITS = 3  # moments use divisor N-1 and a kurtosis ratio


@dataclass(frozen=True)
class FinitePopulation:
    """N paired (y, x) values; immutable after construction."""

    units: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.units) < _MIN_UNITS:
            raise TooFewRows(len(self.units))
        for y, x in self.units:
            if not (math.isfinite(y) and math.isfinite(x)):
                raise ValueError(f"non-finite unit ({y}, {x})")

    @property
    def N(self) -> int:
        return len(self.units)

    @property
    def ys(self) -> tuple[float, ...]:
        return tuple(u[0] for u in self.units)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(u[1] for u in self.units)


@dataclass(frozen=True)
class PopulationMoments:
    """Population-level summary statistics (variances use divisor N-1).

    ``Kx`` is the regression slope in coefficient-of-variation units,
    rho * Cy / Cx; it is the optimal shrinkage target for the combined
    estimator's weight system.  ``beta2x`` is the kurtosis coefficient of x,
    m4 / m2**2 with central moments on divisor N.
    """

    Ybar: float
    Xbar: float
    Sy2: float
    Sx2: float
    Syx: float
    Cy: float
    Cx: float
    rho: float
    Kx: float
    beta2x: float
    N: int

    def __post_init__(self):
        if self.Sy2 < 0 or self.Sx2 < 0:
            raise ValueError("variances must be nonnegative")
        if self.rho * self.rho > 1 + 1e-12:
            raise ValueError(f"rho^2 = {self.rho**2} exceeds 1")
        # Internal consistency: Kx*Cx == rho*Cy, and the algebraic identity
        # Kx == Syx*Xbar / (Sx2*Ybar).
        lhs, rhs = self.Kx * self.Cx, self.rho * self.Cy
        if abs(lhs - rhs) > 1e-12 * max(abs(lhs), abs(rhs), 1e-30):
            raise ValueError(f"Kx*Cx = {lhs} inconsistent with rho*Cy = {rhs}")
        if self.Sx2 > 0 and self.Ybar != 0:
            alt = self.Syx * self.Xbar / (self.Sx2 * self.Ybar)
            if abs(self.Kx - alt) > 1e-10 * max(abs(self.Kx), abs(alt), 1e-30):
                raise ValueError(f"Kx = {self.Kx} inconsistent with Syx*Xbar/(Sx2*Ybar) = {alt}")

    @classmethod
    def from_coefficients(
        cls,
        *,
        Ybar: float,
        Xbar: float,
        cy: float,
        cx: float,
        rho: float,
        N: int,
        beta2x: float = 3.0,
    ) -> "PopulationMoments":
        """Build a consistent moment set from means, CVs and a correlation.

        Useful for studying the analytic theory at prescribed parameter
        values without materialising a population.
        """
        if Ybar <= 0 or Xbar <= 0 or cy <= 0 or cx <= 0:
            raise ValueError("means and coefficients of variation must be positive")
        if not -1 <= rho <= 1:
            raise ValueError("rho must lie in [-1, 1]")
        sy, sx = cy * Ybar, cx * Xbar
        return cls(
            Ybar=Ybar,
            Xbar=Xbar,
            Sy2=sy * sy,
            Sx2=sx * sx,
            Syx=rho * sy * sx,
            Cy=cy,
            Cx=cx,
            rho=rho,
            Kx=rho * cy / cx,
            beta2x=beta2x,
            N=N,
        )


@dataclass(frozen=True)
class FiniteFactors:
    """Sampling-fraction correction factors for a design (N, n[, n']).

    f1 = 1/n - 1/N; for two-phase designs f2 = 1/n' - 1/N and
    f3 = f1 - f2 (so f1 = f2 + f3 holds exactly by construction).
    f = n/N is the sampling fraction and g = 1 - f.  f2/f3 are None for
    single-phase designs; operations that need them must call
    :meth:`require_two_phase`.
    """

    N: int
    n: int
    n_prime: int | None
    f1: float
    f2: float | None
    f3: float | None
    f: float
    g: float

    def require_two_phase(self) -> tuple[float, float]:
        if self.f2 is None or self.f3 is None:
            raise InvalidSizes("two-phase factors requested but n_prime was not given")
        return self.f2, self.f3


def finite_factors(N: int, n: int, n_prime: int | None = None) -> FiniteFactors:
    """Compute the correction factors for an SRSWOR design of size n from N.

    When ``n_prime`` is given it is the first-phase size of a nested
    two-phase design and must satisfy n <= n' <= N.
    """
    if not (2 <= n <= N):
        raise InvalidSizes(f"need 2 <= n <= N, got n={n}, N={N}")
    f1 = 1.0 / n - 1.0 / N
    f2 = f3 = None
    if n_prime is not None:
        if not (n <= n_prime <= N):
            raise InvalidSizes(f"need n <= n_prime <= N, got n={n}, n_prime={n_prime}, N={N}")
        f2 = 1.0 / n_prime - 1.0 / N
        f3 = f1 - f2
    f = n / N
    return FiniteFactors(N=N, n=n, n_prime=n_prime, f1=f1, f2=f2, f3=f3, f=f, g=1.0 - f)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic bivariate population with controlled correlation."""

    N: int
    target_rho: float
    mean_y: float = 20.0
    mean_x: float = 10.0
    cv_y: float = 0.4
    cv_x: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.N < 10:
            raise InvalidSizes(f"synthetic population needs N >= 10, got {self.N}")
        if not -1 < self.target_rho < 1:
            raise ValueError("target_rho must lie strictly inside (-1, 1)")
        if self.mean_y <= 0 or self.mean_x <= 0 or self.cv_y <= 0 or self.cv_x <= 0:
            raise ValueError("means and CVs must be positive")


_MAX_DRAW_ATTEMPTS = 100
_RHO_BAND = 0.1


def generate_synthetic(spec: SyntheticSpec) -> FinitePopulation:
    """Draw a population whose realized correlation is near ``target_rho``.

    Deterministic for a fixed seed.  A draw is rejected when any x is
    nonpositive (x must stay positive for ratio-type estimation) or when the
    realized correlation leaves the +/-0.1 band around the target; after 100
    rejected attempts :class:`TargetUnreachable` is raised.
    """
    rng = np.random.default_rng(spec.seed)
    scale = math.sqrt(1.0 - spec.target_rho**2)
    for _ in range(_MAX_DRAW_ATTEMPTS):
        z_x = rng.standard_normal(spec.N)
        z_y = spec.target_rho * z_x + scale * rng.standard_normal(spec.N)
        x = spec.mean_x * (1.0 + spec.cv_x * z_x)
        y = spec.mean_y * (1.0 + spec.cv_y * z_y)
        if np.any(x <= 0):
            continue
        r = float(np.corrcoef(y, x)[0, 1])
        if abs(r - spec.target_rho) <= _RHO_BAND:
            return FinitePopulation(tuple(zip(map(float, y), map(float, x))))
    raise TargetUnreachable(
        f"no draw satisfied x > 0 and |rho - {spec.target_rho}| <= {_RHO_BAND} "
        f"within {_MAX_DRAW_ATTEMPTS} attempts"
    )


def compute_moments(pop: FinitePopulation) -> PopulationMoments:
    """Population moments with divisor N-1 (kurtosis uses divisor N).

    Raises :class:`DegenerateVariance` when all x or all y coincide and
    :class:`ZeroMean` when either mean vanishes (CVs would be undefined).
    """
    N = pop.N
    ys, xs = pop.ys, pop.xs
    Ybar = math.fsum(ys) / N
    Xbar = math.fsum(xs) / N
    Sy2 = math.fsum((y - Ybar) ** 2 for y in ys) / (N - 1)
    Sx2 = math.fsum((x - Xbar) ** 2 for x in xs) / (N - 1)
    Syx = math.fsum((y - Ybar) * (x - Xbar) for y, x in pop.units) / (N - 1)
    if Ybar == 0 or Xbar == 0:
        raise ZeroMean("population mean of y and x must both be nonzero")
    sy, sx = math.sqrt(Sy2), math.sqrt(Sx2)
    if sy <= 1e-14 * abs(Ybar) or sx <= 1e-14 * abs(Xbar):
        raise DegenerateVariance("all y or all x values coincide; CV vanishes, Kx undefined")
    Cy, Cx = sy / Ybar, sx / Xbar
    rho = Syx / (sy * sx)
    m2 = math.fsum((x - Xbar) ** 2 for x in xs) / N
    m4 = math.fsum((x - Xbar) ** 4 for x in xs) / N
    return PopulationMoments(
        Ybar=Ybar,
        Xbar=Xbar,
        Sy2=Sy2,
        Sx2=Sx2,
        Syx=Syx,
        Cy=Cy,
        Cx=Cx,
        rho=rho,
        Kx=rho * Cy / Cx,
        beta2x=m4 / (m2 * m2),
        N=N,
    )


def _open_text(source) -> IO[str]:
    if isinstance(source, str):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)):
        return io.TextIOWrapper(source, encoding="utf-8", newline="")
    return source  # already a text stream


def load_population(source) -> FinitePopulation:
    """Read a population from CSV (path, text/byte stream, or bytes).

    The header must contain columns named ``y`` and ``x`` (case-insensitive,
    any order); extra columns are ignored.  Cells that fail to parse as
    finite numbers raise :class:`NonNumericCell` with the 1-based data-row
    index.
    """
    fh = _open_text(source)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TooFewRows(0) from None
        lowered = [h.strip().lower() for h in header]
        try:
            y_col = lowered.index("y")
        except ValueError:
            raise MissingColumn("y") from None
        try:
            x_col = lowered.index("x")
        except ValueError:
            raise MissingColumn("x") from None

        units: list[tuple[float, float]] = []
        for i, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            pair = []
            for col, name in ((y_col, "y"), (x_col, "x")):
                raw = row[col] if col < len(row) else ""
                try:
                    v = float(raw)
                except ValueError:
                    raise NonNumericCell(i, name, raw) from None
                if not math.isfinite(v):
                    raise NonNumericCell(i, name, raw)
                pair.append(v)
            units.append((pair[0], pair[1]))
    finally:
        if fh is not source:
            fh.close()
    if len(units) < _MIN_UNITS:
        raise TooFewRows(len(units))
    return FinitePopulation(tuple(units))


def save_population(pop: FinitePopulation, target) -> None:
    """Write ``y,x`` CSV with full-precision reprs (load o save is identity)."""
    lines = ["y,x\n"]
    lines += [f"{y!r},{x!r}\n" for y, x in pop.units]
    text = "".join(lines)
    if isinstance(target, str):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        target.write(text)


def units_from_arrays(ys: Iterable[float], xs: Iterable[float]) -> FinitePopulation:
    """Convenience constructor from parallel y/x sequences."""
    return FinitePopulation(tuple((float(y), float(x)) for y, x in zip(ys, xs, strict=True)))
