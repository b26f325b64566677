"""Second moments of linear advection-diffusion-reaction SPDEs driven by
multiplicative white noise, by two deterministic methods: recursive
multi-stage Wiener chaos expansion and recursive multi-stage sparse-grid
stochastic collocation, with a Monte Carlo cross-check."""

from . import monte_carlo, scm, wce
from .chaos import (
    BrownianTruncation,
    MultiIndex,
    MultiIndexSet,
    TemporalBasis,
    hermite,
    multi_index_set,
    wick_coefficient,
)
from .exceptions import (
    ConfigError,
    GridTooLargeError,
    MeasureError,
    QuadratureError,
    SolverError,
    SpdeMomentsError,
    TimeStepError,
    TruncationTooLargeError,
)
from .harness import (
    ConvergenceReport,
    ErrorMeasures,
    ExperimentConfig,
    ReferenceSpec,
    convergence_orders,
    error_measures,
    measures_from_norms,
    preset,
    run,
)
from .moments import CovarianceMatrix, SecondMomentResult
from .problems import build_example
from .sparse_grid import (
    GaussHermiteRule,
    SparseGridRule,
    gauss_hermite_rule,
    smolyak_point_count,
    smolyak_rule,
    tensor_rule,
)
from .spatial import FourierGrid, SpdeProblem
from .time_integration import LinearEvolution, crank_nicolson

__version__ = "0.1.0"

__all__ = [
    "BrownianTruncation",
    "ConfigError",
    "ConvergenceReport",
    "CovarianceMatrix",
    "ErrorMeasures",
    "ExperimentConfig",
    "FourierGrid",
    "GaussHermiteRule",
    "GridTooLargeError",
    "LinearEvolution",
    "MeasureError",
    "MultiIndex",
    "MultiIndexSet",
    "QuadratureError",
    "ReferenceSpec",
    "SecondMomentResult",
    "SolverError",
    "SparseGridRule",
    "SpdeMomentsError",
    "SpdeProblem",
    "TemporalBasis",
    "TimeStepError",
    "TruncationTooLargeError",
    "build_example",
    "convergence_orders",
    "crank_nicolson",
    "error_measures",
    "gauss_hermite_rule",
    "hermite",
    "measures_from_norms",
    "monte_carlo",
    "multi_index_set",
    "preset",
    "run",
    "scm",
    "smolyak_point_count",
    "smolyak_rule",
    "tensor_rule",
    "wce",
    "wick_coefficient",
]
