"""Probability primitives and run-wide configuration."""

from .config import LOG_ENV_VAR, OptimizerConfig, OracleLimits, SimulationSettings
from .distributions import (
    NORMALIZE_TOLERANCE,
    SUM_TOLERANCE,
    Bucket,
    BucketedDistribution,
    DistributionError,
    DistributionUsageError,
    PrefixTables,
    VisitCounter,
    coalesce,
    collapse_to_mean,
    discrete,
    expectation,
    from_public_list,
    mode,
    point,
    point_masses,
    prefix_tables,
    product_distribution,
    product_of,
    rebucket,
)
from .markov import TransitionModel, advance, check_states

__all__ = [
    "Bucket",
    "BucketedDistribution",
    "DistributionError",
    "DistributionUsageError",
    "LOG_ENV_VAR",
    "NORMALIZE_TOLERANCE",
    "OptimizerConfig",
    "OracleLimits",
    "PrefixTables",
    "SUM_TOLERANCE",
    "SimulationSettings",
    "TransitionModel",
    "VisitCounter",
    "advance",
    "check_states",
    "coalesce",
    "collapse_to_mean",
    "discrete",
    "expectation",
    "from_public_list",
    "mode",
    "point",
    "point_masses",
    "prefix_tables",
    "product_distribution",
    "product_of",
    "rebucket",
]
