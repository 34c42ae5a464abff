"""
BA / Chung-Lu spectra and quantum search

Random-graph ensembles, adjacency spectra, ensemble statistics and
continuous-time quantum spatial search.
"""

from .errors import (
    BaclError,
    CapacityError,
    ConfigError,
    ContractError,
    DegeneracyError,
    DimensionError,
    DomainError,
    NonConvergenceError,
    ParameterError,
)
from .graph import Graph, adjacency_matvec, connected_components, degrees
from .generators import derive_seed, generate_ba, generate_cl, generate_cl_naive
from .weights import DerivationConfig, DerivationResult, derive_weights, running_mean_update
from .spectra import SpectrumSummary, extreme_eigs, full_spectrum, principal_eigenvector
from .stats import (
    KsResult,
    euclid_half_distance,
    inf_distance,
    ks_two_sample,
    loglog_slope,
    mean,
    standardize,
)
from .ctqw import (
    EvolutionConfig,
    SearchOperator,
    SearchRun,
    jumping_rate,
    optimal_expected_time,
    optimal_time_plateau,
    search_scaling,
    success_probabilities,
)
from .models import ba_degree_pmf, expected_degree_density, histogram_compare
from .harness import EXPERIMENTS, ExperimentConfig, RunManifest, load_manifest, run_experiment

__version__ = "1.0.0"
__author__ = "ba-cl-spectra contributors"

__all__ = [
    "BaclError",
    "CapacityError",
    "ConfigError",
    "ContractError",
    "DegeneracyError",
    "DimensionError",
    "DomainError",
    "NonConvergenceError",
    "ParameterError",
    "Graph",
    "adjacency_matvec",
    "connected_components",
    "degrees",
    "derive_seed",
    "generate_ba",
    "generate_cl",
    "generate_cl_naive",
    "DerivationConfig",
    "DerivationResult",
    "derive_weights",
    "running_mean_update",
    "SpectrumSummary",
    "extreme_eigs",
    "full_spectrum",
    "principal_eigenvector",
    "KsResult",
    "euclid_half_distance",
    "inf_distance",
    "ks_two_sample",
    "loglog_slope",
    "mean",
    "standardize",
    "EvolutionConfig",
    "SearchOperator",
    "SearchRun",
    "jumping_rate",
    "optimal_expected_time",
    "optimal_time_plateau",
    "search_scaling",
    "success_probabilities",
    "ba_degree_pmf",
    "expected_degree_density",
    "histogram_compare",
    "EXPERIMENTS",
    "ExperimentConfig",
    "RunManifest",
    "load_manifest",
    "run_experiment",
]
