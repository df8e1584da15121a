"""Join and sort cost formulas with their expected-cost evaluators."""

from .bucketing import coarsen_memory, derive_memory_buckets
from .expectation import (
    FAST_EVALUATORS,
    expected_cost_generic,
    expected_cost_grace_hash_fast,
    expected_cost_nested_loop_fast,
    expected_cost_sort_merge_fast,
    expected_join_cost,
    expected_sort_cost,
)
from .formulas import (
    FORMULAS,
    CostDomainError,
    JoinMethod,
    cost_external_sort,
    cost_grace_hash,
    cost_nested_loop,
    cost_sort_merge,
    external_sort_cost,
    join_cost,
)

__all__ = [
    "FAST_EVALUATORS",
    "FORMULAS",
    "CostDomainError",
    "JoinMethod",
    "coarsen_memory",
    "cost_external_sort",
    "cost_grace_hash",
    "cost_nested_loop",
    "cost_sort_merge",
    "derive_memory_buckets",
    "expected_cost_generic",
    "expected_cost_grace_hash_fast",
    "expected_cost_nested_loop_fast",
    "expected_cost_sort_merge_fast",
    "expected_join_cost",
    "expected_sort_cost",
    "external_sort_cost",
    "join_cost",
]
