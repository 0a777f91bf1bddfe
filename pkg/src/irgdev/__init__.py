"""Deviations of clique and subgraph counts in heavy-tailed random graphs.

Library layout:

- graph_model:         Pareto weights, connection kernel, graph realization
- subgraph_catalog:    pattern canonicalization, enumeration, exact counting
- conditional_counts:  expected counts conditional on the weight vector
- asymptotics:         scaling exponents, hub thresholds, tail envelope
- deviation_optimizer: piecewise-linear rate optimization (exact LP + oracle)
- experiments / cli:   reproducible Monte Carlo drivers
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    ConfigError,
    DataError,
    InfeasibleError,
    ParameterError,
)
from .rng import RandomSeed

__all__ = [
    "BudgetExceededError",
    "ConfigError",
    "DataError",
    "InfeasibleError",
    "ParameterError",
    "RandomSeed",
    "__version__",
]
