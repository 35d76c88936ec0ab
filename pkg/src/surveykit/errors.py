"""Semantic exception hierarchy.

Every error the toolkit raises derives from :class:`SurveyKitError`.  The
``exit_code`` attribute is the process exit status the CLI uses when the
error escapes a subcommand: 1 usage, 2 I/O or ingestion, 3 numerical
degeneracy.  (Exit code 4 is reserved for verification failures, which are
reported, not raised.)
"""

from __future__ import annotations


class SurveyKitError(Exception):
    """Base class for all toolkit errors (CLI exit code 1)."""

    exit_code = 1


class DataError(SurveyKitError):
    """Ingestion / file-format problems (CLI exit code 2)."""

    exit_code = 2


class NumericalError(SurveyKitError):
    """Numerical degeneracies and guard violations (CLI exit code 3)."""

    exit_code = 3


# --- population ingestion -----------------------------------------------


class MissingColumn(DataError):
    """The CSV header lacks a required column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"required column {column!r} not found in header")


class NonNumericCell(DataError):
    """A data cell failed to parse as a finite number.

    ``row`` is the 1-based data-row index (the header row is not counted).
    """

    def __init__(self, row: int, column: str, raw: str):
        self.row = row
        self.column = column
        self.raw = raw
        super().__init__(f"non-numeric value {raw!r} in column {column!r}, data row {row}")


class TooFewRows(DataError):
    def __init__(self, found: int, minimum: int = 3):
        self.found = found
        super().__init__(f"population needs at least {minimum} data rows, found {found}")


# --- sizes, grids and other argument contracts ---------------------------


class InvalidSizes(SurveyKitError):
    """Sample/population size constraints violated (e.g. n > N)."""


class TooManySubsets(SurveyKitError):
    """An exhaustive enumeration would exceed the subset-count guard."""


class EmptyGrid(SurveyKitError):
    """A family-member grid has no rows or no columns."""


class WeightsNotNormalized(SurveyKitError):
    """Combination weights do not sum to one."""


# --- numerical degeneracies ----------------------------------------------


class DegenerateVariance(NumericalError):
    """All y (or all x) values identical: coefficients of variation vanish."""


class ZeroMean(NumericalError):
    """A population mean is zero; CV-based quantities are undefined."""


class ZeroSampleMeanX(NumericalError):
    """Sample mean of x is zero; the ratio estimator is undefined."""


class DegenerateDenominator(NumericalError):
    """A shifted-mean denominator vanished (or went nonpositive where positivity is required)."""


class NonPositiveBase(NumericalError):
    """A fractional power was requested of a nonpositive base."""


class ZeroMse(NumericalError):
    """Relative-efficiency denominator MSE is not strictly positive."""


class TargetUnreachable(NumericalError):
    """Synthetic population generation exhausted its redraw budget."""


class SingularSystem(NumericalError):
    """The weight-determining linear system is singular or too ill-conditioned.

    ``rows`` carries the pair of (near-)dependent row vectors for diagnosis.
    """

    def __init__(self, message: str, rows: tuple[tuple[float, ...], tuple[float, ...]] | None = None):
        self.rows = rows
        if rows is not None:
            message = f"{message}; degenerate rows {rows[0]} and {rows[1]}"
        super().__init__(message)


class EstimatorError(NumericalError):
    """An estimator failed on a specific sample during enumeration / simulation.

    ``context`` identifies the offending draw: an index tuple for
    enumeration, a replicate number for Monte Carlo.
    """

    def __init__(self, context, cause: Exception):
        self.context = context
        self.cause = cause
        super().__init__(f"estimator failed on sample {context}: {cause}")
