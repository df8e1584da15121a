"""Least-specific-cost and least-expected-cost optimizers.

``lsc``
    System R dynamic programming at one fixed memory value.
``lec-a``
    The LSC plan at every memory representative, re-ranked by expected cost.
``lec-b``
    Like ``lec-a`` but keeps the top ``c`` plans per subset at each memory value.
``lec-c``
    Dynamic programming directly on expected costs, static or drifting memory.
``lec-d``
    ``lec-c`` with page counts and selectivities carried as distributions.

``lsc`` through ``lec-c`` collapse page counts and selectivities to their
expectations, so memory is the only random parameter.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from enum import Enum

from ..catalog.model import Catalog, Environment, EnvironmentMode, QuerySpec
from ..core.config import OptimizerConfig
from ..core.distributions import expectation
from .dp import run_dp
from .plan import Plan
from .problem import (
    OptimizerUsageError,
    Problem,
    evaluate_plan,
    phase_memories,
    point_memories,
)

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    """Optimizer names accepted by the command line."""

    LSC = "lsc"
    LEC_A = "lec-a"
    LEC_B = "lec-b"
    LEC_C = "lec-c"
    LEC_D = "lec-d"


def _require_static(environment: Environment, algorithm: str) -> None:
    if environment.mode is not EnvironmentMode.STATIC:
        raise OptimizerUsageError(
            f"{algorithm} needs a static environment, got {environment.mode.value}; use lec-c or lec-d for drifting memory"
        )


def _best(plans: Iterable[Plan]) -> Plan:
    return min(plans, key=lambda plan: plan.sort_key)


def candidate_memories(environment: Environment, config: OptimizerConfig) -> tuple[float, ...]:
    """Memory values at which Algorithms A and B generate candidates.

    These are the memory representatives, plus the mean when it is not one of
    them and ``config.include_mean_candidate`` is set.  The extra mean
    candidate goes beyond the classic one-candidate-per-bucket Algorithm A; it
    keeps lec-a no worse than lsc at the mean.  Switch it off to get exactly
    one candidate per memory bucket.
    """

    values = tuple(float(v) for v in environment.memory.reps)
    mean = expectation(environment.memory)
    if config.include_mean_candidate and mean not in values:
        values += (mean,)
    return values


def rank_plans(plans: Iterable[Plan], problem: Problem, environment: Environment) -> list[Plan]:
    """Evaluate ``plans`` under ``environment`` and sort them by expected cost.

    Structurally identical plans are evaluated once.
    """

    memories = phase_memories(environment, problem.n)
    unique: dict[object, Plan] = {}
    for plan in plans:
        unique.setdefault(plan.structure, plan)
    evaluated = [evaluate_plan(plan, problem, memories) for plan in unique.values()]
    return sorted(evaluated, key=lambda plan: plan.sort_key)


def optimize_lsc(
    catalog: Catalog,
    query: QuerySpec,
    fixed: float,
    *,
    config: OptimizerConfig | None = None,
) -> Plan:
    """Return the least-cost plan at memory ``fixed``, costed at that point."""

    problem = Problem(catalog, query, config or OptimizerConfig())
    plan = run_dp(problem, point_memories(fixed, problem.n)).best
    logger.info("lsc: %d relations at memory %g, cost %.2f", problem.n, fixed, plan.expected_cost)
    return plan


def lec_a_candidates(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
) -> list[Plan]:
    """Distinct LSC plans over :func:`candidate_memories`, ranked by expected cost."""

    config = config or OptimizerConfig()
    _require_static(environment, "lec-a")
    problem = Problem(catalog, query, config)
    plans = [
        run_dp(problem, point_memories(value, problem.n)).best
        for value in candidate_memories(environment, config)
    ]
    return rank_plans(plans, problem, environment)


def optimize_lec_a(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
) -> Plan:
    """Algorithm A: the LSC candidate of least expected cost."""

    ranked = lec_a_candidates(catalog, query, environment, config=config)
    logger.info("lec-a: %d distinct candidates, expected cost %.2f", len(ranked), ranked[0].expected_cost)
    return ranked[0]


def lec_b_candidates(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    c: int | None = None,
    *,
    config: OptimizerConfig | None = None,
) -> list[Plan]:
    """Pool of top-``c`` plans over :func:`candidate_memories`, ranked by expected cost."""

    config = config or OptimizerConfig()
    width = config.top_c if c is None else c
    if width < 1:
        raise OptimizerUsageError("lec-b needs c >= 1")
    _require_static(environment, "lec-b")
    problem = Problem(catalog, query, config)
    pool: list[Plan] = []
    examined = 0
    for value in candidate_memories(environment, config):
        result = run_dp(problem, point_memories(value, problem.n), top_c=width)
        pool.extend(result.plans)
        examined += result.examined_pairs
    logger.debug("lec-b: %d pooled plans, %d merge pairs examined", len(pool), examined)
    return rank_plans(pool, problem, environment)


def optimize_lec_b(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    c: int | None = None,
    *,
    config: OptimizerConfig | None = None,
) -> Plan:
    """Algorithm B: the pooled top-``c`` candidate of least expected cost."""

    ranked = lec_b_candidates(catalog, query, environment, c, config=config)
    logger.info("lec-b: %d distinct candidates, expected cost %.2f", len(ranked), ranked[0].expected_cost)
    return ranked[0]


def optimize_lec_c(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
) -> Plan:
    """Algorithm C: dynamic programming on expected cost under static memory."""

    _require_static(environment, "lec-c")
    problem = Problem(catalog, query, config or OptimizerConfig())
    plan = run_dp(problem, phase_memories(environment, problem.n)).best
    logger.info(
        "lec-c: %d relations, %d memory buckets, expected cost %.2f",
        problem.n,
        len(environment.memory),
        plan.expected_cost,
    )
    return plan


def optimize_lec_c_dynamic(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
) -> Plan:
    """Algorithm C with memory drifting between phases along the transition model."""

    if environment.mode is not EnvironmentMode.DYNAMIC:
        raise OptimizerUsageError("lec-c dynamic needs an environment with a transition model")
    problem = Problem(catalog, query, config or OptimizerConfig())
    plan = run_dp(problem, phase_memories(environment, problem.n)).best
    logger.info(
        "lec-c dynamic: %d relations, %d memory states, expected cost %.2f",
        problem.n,
        len(environment.memory),
        plan.expected_cost,
    )
    return plan


def optimize_lec_d(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
) -> Plan:
    """Algorithm D: expected-cost dynamic programming over every uncertain parameter."""

    config = config or OptimizerConfig()
    problem = Problem(catalog, query, config, collapse=False)
    plan = run_dp(problem, phase_memories(environment, problem.n)).best
    logger.info(
        "lec-d: %d relations, %s memory, result size of %d buckets, expected cost %.2f",
        problem.n,
        environment.mode.value,
        len(problem.size(problem.everything)),
        plan.expected_cost,
    )
    return plan


def optimize(
    algorithm: Algorithm | str,
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
    fixed_memory: float | None = None,
    c: int | None = None,
) -> Plan:
    """Run ``algorithm``; ``lsc`` uses ``fixed_memory`` or the mean memory.

    ``lec-c`` dispatches to the dynamic variant when the environment drifts.
    """

    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.LSC:
        value = expectation(environment.memory) if fixed_memory is None else fixed_memory
        return optimize_lsc(catalog, query, value, config=config)
    if algorithm is Algorithm.LEC_A:
        return optimize_lec_a(catalog, query, environment, config=config)
    if algorithm is Algorithm.LEC_B:
        return optimize_lec_b(catalog, query, environment, c, config=config)
    if algorithm is Algorithm.LEC_C:
        if environment.mode is EnvironmentMode.DYNAMIC:
            return optimize_lec_c_dynamic(catalog, query, environment, config=config)
        return optimize_lec_c(catalog, query, environment, config=config)
    return optimize_lec_d(catalog, query, environment, config=config)


def evaluate_under(
    plans: Sequence[Plan],
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    config: OptimizerConfig | None = None,
) -> list[Plan]:
    """Expected costs of ``plans`` under ``environment`` with collapsed sizes, in input order."""

    problem = Problem(catalog, query, config or OptimizerConfig())
    memories = phase_memories(environment, problem.n)
    return [evaluate_plan(plan, problem, memories) for plan in plans]


__all__ = [
    "Algorithm",
    "candidate_memories",
    "evaluate_under",
    "lec_a_candidates",
    "lec_b_candidates",
    "optimize",
    "optimize_lec_a",
    "optimize_lec_b",
    "optimize_lec_c",
    "optimize_lec_c_dynamic",
    "optimize_lec_d",
    "optimize_lsc",
    "rank_plans",
]
