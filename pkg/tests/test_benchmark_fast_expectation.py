"""Benchmark the linear-time expected join cost against the triple sum."""

import numpy as np
import pytest

from lec_optimizer.core.distributions import point_masses
from lec_optimizer.costs.expectation import expected_cost_generic, expected_join_cost
from lec_optimizer.costs.formulas import JoinMethod
from lec_optimizer.optimizer import optimize_lec_d
from lec_optimizer.validation import random_instance


def _bucketed(rng: np.random.Generator, low: float, high: float, size: int):
    values = np.unique(rng.uniform(low, high, size=size).round())
    return point_masses(values, rng.dirichlet(np.ones(values.size)))


def test_fast_sort_merge_benchmark(benchmark) -> None:
    """Run the fast evaluator on 200-bucket inputs and check it against the triple sum."""
    rng = np.random.default_rng(3)
    memory = _bucketed(rng, 16, 4_000, 200)
    outer = _bucketed(rng, 1_000, 1_000_000, 200)
    inner = _bucketed(rng, 1_000, 1_000_000, 200)

    def run():
        return expected_join_cost(JoinMethod.SORT_MERGE, memory, outer, inner)

    fast = benchmark(run)

    assert fast == pytest.approx(expected_cost_generic(JoinMethod.SORT_MERGE, memory, outer, inner), rel=1e-9)


def test_lec_d_benchmark(benchmark) -> None:
    """Optimize a six-relation query with bucketed sizes and selectivities."""
    catalog, query, environment = random_instance(9, 6, 8, size_buckets=4, selectivity_buckets=3)

    plan = benchmark(lambda: optimize_lec_d(catalog, query, environment))

    assert len(plan.order) == 6
    assert plan.expected_cost > 0.0
