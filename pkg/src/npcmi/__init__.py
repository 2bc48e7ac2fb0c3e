"""Mutual information from a nonparametric copula density.

Typical use::

    import numpy as np
    from npcmi import estimate_mi

    rng = np.random.default_rng(0)
    x = rng.standard_normal(2000)
    y = x + rng.standard_normal(2000)
    estimate_mi(x, y).mi_bits   # ~0.5 bits
"""
from .bandwidth import BandwidthConfig, optimize_bandwidth
from .discrete import PoissonMarginal, discrete_ground_truth_mi, jitter, sample_discrete
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    InfiniteInformationError,
    NPCError,
    NumericalConsistencyError,
    OptimizationError,
    ParseError,
)
from .estimator import EstimatorConfig, MIEstimate, estimate_mi, estimate_mi_gc
from .harness import ExperimentConfig, run_experiment
from .parametric import CopulaSpec, analytic_mi, rosenblatt_sample

__all__ = [
    "BandwidthConfig",
    "ConfigurationError",
    "CopulaSpec",
    "DegenerateInputError",
    "DomainError",
    "EstimatorConfig",
    "ExperimentConfig",
    "InfiniteInformationError",
    "MIEstimate",
    "NPCError",
    "NumericalConsistencyError",
    "OptimizationError",
    "ParseError",
    "PoissonMarginal",
    "analytic_mi",
    "discrete_ground_truth_mi",
    "estimate_mi",
    "estimate_mi_gc",
    "jitter",
    "optimize_bandwidth",
    "rosenblatt_sample",
    "run_experiment",
    "sample_discrete",
]
