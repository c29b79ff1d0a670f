"""Negatively correlated search for continuous black-box minimization."""

from .baselines import phc_run, random_search_run
from .engine import NcsConfig, RunRecord, SearchDistribution, bhattacharyya_gaussian, ncs_run
from .estimator import NCSOptimizer, PHCOptimizer, RandomSearchOptimizer
from .objectives import ObjectiveSpec, make_problem
from .rng import make_stream

__version__ = "0.1.0"

__all__ = [
    "NcsConfig",
    "RunRecord",
    "SearchDistribution",
    "ObjectiveSpec",
    "NCSOptimizer",
    "PHCOptimizer",
    "RandomSearchOptimizer",
    "bhattacharyya_gaussian",
    "make_problem",
    "make_stream",
    "ncs_run",
    "phc_run",
    "random_search_run",
]
