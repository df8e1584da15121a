"""Seeded multi-instance properties: oracle equivalence, cost ladder and degeneracy."""

from __future__ import annotations

from itertools import combinations

import pytest

from lec_optimizer.catalog import Catalog, Environment, Predicate, QuerySpec, Relation
from lec_optimizer.core.config import OptimizerConfig
from lec_optimizer.core.distributions import discrete, expectation, point
from lec_optimizer.costs.formulas import JoinMethod
from lec_optimizer.optimizer import (
    Plan,
    Problem,
    evaluate_plan,
    evaluate_under,
    optimize,
    optimize_lec_a,
    optimize_lec_b,
    optimize_lec_c,
    optimize_lec_d,
    optimize_lsc,
    phase_memories,
)
from lec_optimizer.validation import oracle_best, random_instance

pytestmark = pytest.mark.acceptance

SUITE = [(seed, 2 + seed % 5, 2 + seed % 3) for seed in range(50)]


@pytest.mark.parametrize(("seed", "n", "memory_buckets"), SUITE)
def test_lec_c_matches_the_oracle(seed: int, n: int, memory_buckets: int) -> None:
    catalog, query, environment = random_instance(seed, n, memory_buckets)

    plan = optimize_lec_c(catalog, query, environment)
    oracle = oracle_best(catalog, query, environment, collapse=True)

    assert plan.expected_cost == pytest.approx(oracle.best.expected_cost, rel=1e-9)


@pytest.mark.parametrize(("seed", "n", "memory_buckets"), SUITE)
def test_cost_ladder(seed: int, n: int, memory_buckets: int) -> None:
    catalog, query, environment = random_instance(seed, n, memory_buckets)

    lsc = optimize_lsc(catalog, query, expectation(environment.memory))
    (lsc_expected,) = evaluate_under([lsc], catalog, query, environment)
    a = optimize_lec_a(catalog, query, environment)
    b = optimize_lec_b(catalog, query, environment, 3)
    c = optimize_lec_c(catalog, query, environment)

    assert c.expected_cost <= b.expected_cost <= a.expected_cost <= lsc_expected.expected_cost


@pytest.mark.parametrize("seed", range(20))
def test_point_memory_makes_every_algorithm_agree(seed: int) -> None:
    catalog, query, environment = random_instance(100 + seed, 2 + seed % 4, 1)
    assert environment.memory.is_point

    costs = {
        algorithm: optimize(algorithm, catalog, query, environment).expected_cost
        for algorithm in ("lsc", "lec-a", "lec-b", "lec-c", "lec-d")
    }

    assert len(set(costs.values())) == 1, costs


@pytest.mark.parametrize("seed", range(10))
def test_point_memory_environment_equals_fixed_memory(seed: int) -> None:
    catalog, query, _ = random_instance(200 + seed, 4, 1)

    fixed = optimize_lsc(catalog, query, 512.0)
    degenerate = optimize_lec_c(catalog, query, Environment(point(512.0)))

    assert degenerate == fixed


@pytest.mark.parametrize("seed", range(20))
def test_lec_d_on_point_sizes_equals_lec_c(seed: int) -> None:
    catalog, query, environment = random_instance(300 + seed, 2 + seed % 4, 3)

    assert optimize_lec_d(catalog, query, environment) == optimize_lec_c(catalog, query, environment)


@pytest.mark.parametrize("seed", range(12))
def test_exact_lec_d_matches_the_oracle_joint_sum(seed: int) -> None:
    catalog, query, environment = random_instance(
        400 + seed, 2 + seed % 2, 3, size_buckets=2, selectivity_buckets=2
    )
    exact = OptimizerConfig(rebucket_budget=None, selectivity_budget=None)

    plan = optimize_lec_d(catalog, query, environment, config=exact)
    oracle = oracle_best(catalog, query, environment)

    assert plan.expected_cost == pytest.approx(oracle.best.expected_cost, rel=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_rebucketed_lec_d_stays_within_the_budget(seed: int) -> None:
    catalog, query, environment = random_instance(500 + seed, 4, 2, size_buckets=3, selectivity_buckets=2)
    config = OptimizerConfig(rebucket_budget=8, selectivity_budget=4)

    plan = optimize_lec_d(catalog, query, environment, config=config)
    problem = Problem(catalog, query, config, collapse=False)

    assert len(problem.size(problem.everything)) <= 8
    assert plan.expected_cost is not None and plan.expected_cost > 0.0
    cube = OptimizerConfig(rebucket_budget=8, cube_root_rebucket=True)
    cube_problem = Problem(catalog, query, cube, collapse=False)

    assert len(cube_problem.size(cube_problem.everything)) <= 8
    assert optimize_lec_d(catalog, query, environment, config=cube).expected_cost > 0.0


@pytest.mark.parametrize("seed", range(4))
def test_cube_root_sizes_stay_within_sixteen_buckets(seed: int) -> None:
    catalog, query, _ = random_instance(seed + 5, 5, 2, size_buckets=6, selectivity_buckets=3)
    problem = Problem(catalog, query, OptimizerConfig(rebucket_budget=16, cube_root_rebucket=True), collapse=False)

    for size in range(2, 6):
        for members in combinations(problem.relations, size):
            assert len(problem.size(members)) <= 16


EXACT = OptimizerConfig(rebucket_budget=None, selectivity_budget=None)
SINGLE_BUCKET = OptimizerConfig(rebucket_budget=1, selectivity_budget=1)


def _branch_stable_instance() -> tuple[Catalog, QuerySpec, Environment]:
    """Every join stays in one formula branch for every size realization at memory 5000."""

    catalog = Catalog(
        (
            Relation("A", discrete({20_000.0: 0.5, 40_000.0: 0.5})),
            Relation("B", discrete({30_000.0: 0.5, 50_000.0: 0.5})),
            Relation("C", point(25_000.0)),
        )
    )
    query = QuerySpec(
        relations=("A", "B", "C"),
        predicates=(Predicate("A", "B", point(1e-5)), Predicate("B", "C", point(2e-5))),
    )
    return catalog, query, Environment(point(5_000.0))


def test_single_bucket_lec_d_matches_exact_away_from_breakpoints() -> None:
    catalog, query, environment = _branch_stable_instance()

    exact = optimize_lec_d(catalog, query, environment, config=EXACT)
    coarse = optimize_lec_d(catalog, query, environment, config=SINGLE_BUCKET)
    problem = Problem(catalog, query, EXACT, collapse=False)
    coarse_exact = evaluate_plan(coarse, problem, phase_memories(environment, problem.n))

    assert len(Problem(catalog, query, SINGLE_BUCKET, collapse=False).size(("A", "B"))) == 1
    assert coarse.expected_cost == pytest.approx(exact.expected_cost, rel=1e-9)
    assert coarse_exact.expected_cost == pytest.approx(exact.expected_cost, rel=1e-9)


@pytest.mark.parametrize("seed", range(12))
def test_single_bucket_pass_factor_phases_stay_within_a_factor_of_three(seed: int) -> None:
    catalog, query, environment = random_instance(
        600 + seed, 3 + seed % 2, 3, size_buckets=3, selectivity_buckets=2
    )
    methods = tuple(
        JoinMethod.SORT_MERGE if (seed >> k) % 2 else JoinMethod.GRACE_HASH for k in range(len(query.relations) - 1)
    )
    exact_problem = Problem(catalog, query, EXACT, collapse=False)
    coarse_problem = Problem(catalog, query, SINGLE_BUCKET, collapse=False)
    plan = Plan(
        order=query.relations,
        methods=methods,
        final_sort=exact_problem.requires_final_sort(query.relations, methods),
    )
    memories = phase_memories(environment, exact_problem.n)

    exact = evaluate_plan(plan, exact_problem, memories)
    coarse = evaluate_plan(plan, coarse_problem, memories)

    for fine_phase, coarse_phase in zip(exact.per_phase_costs, coarse.per_phase_costs):
        assert fine_phase / 3.0 * (1 - 1e-9) <= coarse_phase <= fine_phase * 3.0 * (1 + 1e-9)
