"""surveykit: finite-population mean estimation with auxiliary information.

A toolkit for the almost-unbiased class of mean estimators under simple
random sampling without replacement: the tunable estimator families, their
first-order bias/MSE theory, the bias-annihilating weight solver, and
exact-enumeration / Monte Carlo verification engines, for both single-phase
and nested two-phase designs.
"""

from .errors import (
    DataError,
    DegenerateDenominator,
    DegenerateVariance,
    EmptyGrid,
    EstimatorError,
    InvalidSizes,
    MissingColumn,
    NonNumericCell,
    NonPositiveBase,
    NumericalError,
    SingularSystem,
    SurveyKitError,
    TargetUnreachable,
    TooFewRows,
    TooManySubsets,
    WeightsNotNormalized,
    ZeroMean,
    ZeroMse,
    ZeroSampleMeanX,
)
from .estimators import (
    ATOM_NAMES,
    FamilyConfig,
    Sample,
    ShapeFactors,
    TwoPhaseSample,
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
    resolve_atom,
    shape_factors,
)
from .population import (
    FiniteFactors,
    FinitePopulation,
    PopulationMoments,
    SyntheticSpec,
    compute_moments,
    finite_factors,
    generate_synthetic,
    load_population,
    save_population,
    units_from_arrays,
)
from .theory import (
    BiasMse,
    TheoryInput,
    min_mse_tp,
    min_mse_tpd,
    mse_mean,
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
    AnnihilationReport,
    CompareRow,
    EmpiricalStats,
    ExactDistribution,
    VerificationReport,
    bias_annihilation_check,
    compare,
    enumerate_srswor,
    enumerate_two_phase,
    monte_carlo,
)
from .weights import WeightSolution, solve_weights, solve_weights_two_phase

__version__ = "0.1.0"

__all__ = [
    "ATOM_NAMES",
    "AnnihilationReport",
    "BiasMse",
    "CompareRow",
    "DataError",
    "DegenerateDenominator",
    "DegenerateVariance",
    "EmpiricalStats",
    "EmptyGrid",
    "EstimatorError",
    "ExactDistribution",
    "FamilyConfig",
    "FiniteFactors",
    "FinitePopulation",
    "InvalidSizes",
    "MissingColumn",
    "NonNumericCell",
    "NonPositiveBase",
    "NumericalError",
    "PopulationMoments",
    "Sample",
    "ShapeFactors",
    "SingularSystem",
    "SurveyKitError",
    "SyntheticSpec",
    "TargetUnreachable",
    "TheoryInput",
    "TooFewRows",
    "TooManySubsets",
    "TwoPhaseSample",
    "VerificationReport",
    "WeightSolution",
    "WeightsNotNormalized",
    "ZeroMean",
    "ZeroMse",
    "ZeroSampleMeanX",
    "bias_annihilation_check",
    "compare",
    "compute_moments",
    "enumerate_srswor",
    "enumerate_two_phase",
    "est_exp_ratio",
    "est_mean",
    "est_ratio",
    "est_regression",
    "est_t1",
    "est_t1d",
    "est_t2",
    "est_t2d",
    "est_tp",
    "est_tpd",
    "finite_factors",
    "generate_synthetic",
    "load_population",
    "min_mse_tp",
    "min_mse_tpd",
    "monte_carlo",
    "mse_mean",
    "pre_percent",
    "resolve_atom",
    "save_population",
    "shape_factors",
    "solve_weights",
    "solve_weights_two_phase",
    "theory_classical_ratio",
    "theory_exp_ratio",
    "theory_t1",
    "theory_t1d",
    "theory_t2",
    "theory_t2d",
    "theory_tp",
    "theory_tpd",
    "units_from_arrays",
]
