"""Causal-effect estimation for time series under spectrally sparse confounding.

The estimator maps the observed series into an orthonormal basis domain,
where a confounder that is sparse in that basis contaminates only a few
coordinates, and applies robust linear regression there.  The package also
ships the simulation and benchmark harness used to validate the estimator on
synthetic data.
"""

__version__ = "1.0.0"

from .basis import (
    BasisKind,
    BasisMatrix,
    OrthonormalityCheck,
    build_basis,
    check_orthonormality,
    inverse_transform,
    transform,
)
from .bench import (
    AblationKind,
    ExperimentSpec,
    ReplicateRecord,
    ResultRow,
    SweepVerdict,
    run_ablation,
    run_consistency_sweep,
    run_experiment,
)
from .errors import ConfigurationError, FeasibilityError
from .pipeline import DecorConfig, DecorEstimate, Method, decor_fit, deconfound
from .robust import (
    RegressionProblem,
    RobustFit,
    bfs,
    candidate_sets_all_of_size,
    eta_condition,
    hard_threshold,
    ols,
    resolve_count,
    torrent,
)
from .sim import (
    BandLimitedProcess,
    GroundTruth,
    OUProcess,
    SimConfig,
    generate,
    make_rng,
    sample_band_limited,
    sample_ou,
)

__all__ = [
    "__version__",
    "BasisKind",
    "BasisMatrix",
    "OrthonormalityCheck",
    "build_basis",
    "check_orthonormality",
    "transform",
    "inverse_transform",
    "ConfigurationError",
    "FeasibilityError",
    "RegressionProblem",
    "RobustFit",
    "ols",
    "hard_threshold",
    "resolve_count",
    "torrent",
    "bfs",
    "candidate_sets_all_of_size",
    "eta_condition",
    "DecorConfig",
    "DecorEstimate",
    "Method",
    "decor_fit",
    "deconfound",
    "OUProcess",
    "BandLimitedProcess",
    "SimConfig",
    "GroundTruth",
    "make_rng",
    "sample_ou",
    "sample_band_limited",
    "generate",
    "ExperimentSpec",
    "ResultRow",
    "ReplicateRecord",
    "SweepVerdict",
    "AblationKind",
    "run_experiment",
    "run_consistency_sweep",
    "run_ablation",
]
