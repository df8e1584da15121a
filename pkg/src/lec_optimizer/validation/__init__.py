"""Ground truth for the optimizers: exhaustive oracle, Monte Carlo and seeded instances."""

from .instances import random_instance
from .oracle import (
    JointSpace,
    OracleRefusal,
    OracleResult,
    build_joint_space,
    enumerate_left_deep,
    exact_expected_cost,
    memory_slots,
    oracle_best,
    plan_count,
    realized_costs,
)
from .simulator import (
    RNG_ALGORITHM,
    PlanOutcome,
    SimReport,
    compare,
    sample_trajectories,
    sample_trajectory,
    simulate,
)

__all__ = [
    "JointSpace",
    "OracleRefusal",
    "OracleResult",
    "PlanOutcome",
    "RNG_ALGORITHM",
    "SimReport",
    "build_joint_space",
    "compare",
    "enumerate_left_deep",
    "exact_expected_cost",
    "memory_slots",
    "oracle_best",
    "plan_count",
    "random_instance",
    "realized_costs",
    "sample_trajectories",
    "sample_trajectory",
    "simulate",
]
