"""The cost model shared by every optimizer and by plan evaluation.

A :class:`Problem` binds a catalog, a query and an :class:`OptimizerConfig`
and answers the questions the dynamic program asks: the size distribution of
a joined subset, the expected cost of one join phase, and the cost of the
final sort.  Plan evaluation uses the very same calls in the same order, so
an optimizer's annotated cost and a later evaluation of the same plan agree
to the last bit.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from ..catalog.model import Catalog, Environment, Predicate, QuerySpec, selectivity_between
from ..core.config import OptimizerConfig
from ..core.distributions import (
    BucketedDistribution,
    collapse_to_mean,
    expectation,
    point,
    product_of,
    rebucket,
)
from ..core.markov import advance
from ..costs.bucketing import coarsen_memory
from ..costs.expectation import expected_join_cost, expected_sort_cost
from ..costs.formulas import JoinMethod
from .plan import Plan, PlanError

logger = logging.getLogger(__name__)

Subset = frozenset[str]


class OptimizerUsageError(ValueError):
    """Raised when an optimizer is called outside its contract."""


@dataclass(frozen=True)
class Problem:
    """Catalog, query and configuration bound into one cost model.

    With ``collapse`` every page count and selectivity is replaced by its
    expectation, leaving memory as the only random parameter.  Without it
    the full distributions are carried and result sizes are propagated
    bucket by bucket.
    """

    catalog: Catalog
    query: QuerySpec
    config: OptimizerConfig = field(default_factory=OptimizerConfig)
    collapse: bool = True
    _pages: dict[str, BucketedDistribution] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )
    _model_query: QuerySpec | None = field(default=None, init=False, repr=False, compare=False)
    _sizes: dict[Subset, BucketedDistribution] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        """Check the query against the catalog and prepare the inputs."""

        if not self.query.relations:
            raise OptimizerUsageError("cannot optimize an empty query")
        self.catalog.check_query(self.query)
        pages = {name: self.catalog.relation(name).pages for name in self.query.relations}
        query = self.query
        if self.collapse:
            pages = {name: collapse_to_mean(d) for name, d in pages.items()}
            query = QuerySpec(
                relations=query.relations,
                predicates=tuple(
                    Predicate(p.left, p.right, collapse_to_mean(p.selectivity)) for p in query.predicates
                ),
                sorted_result_required=query.sorted_result_required,
                order_column_owner=query.order_column_owner,
            )
        object.__setattr__(self, "_pages", pages)
        object.__setattr__(self, "_model_query", query)

    @property
    def relations(self) -> tuple[str, ...]:
        """Query relations in lexicographic order."""

        return tuple(sorted(self.query.relations))

    @property
    def n(self) -> int:
        """Number of relations in the query."""

        return len(self.query.relations)

    @property
    def everything(self) -> Subset:
        """The subset holding every query relation."""

        return frozenset(self.query.relations)

    def pages(self, name: str) -> BucketedDistribution:
        """Page-count distribution of ``name`` as the model sees it."""

        return self._pages[name]

    def selectivity(self, j: str, others: Iterable[str]) -> BucketedDistribution:
        """Combined selectivity joining ``j`` to ``others``."""

        return selectivity_between(
            self._model_query or self.query,
            j,
            sorted(others),
            budget=self.config.selectivity_budget,
        )

    def size(self, subset: Iterable[str]) -> BucketedDistribution:
        """Result-size distribution of joining ``subset``, memoized per subset.

        The size of a subset does not depend on the join order, so it is
        derived once, peeling off the member with the fewest page buckets
        (ties by name).
        """

        key = frozenset(subset)
        cached = self._sizes.get(key)
        if cached is not None:
            return cached
        if not key:
            raise OptimizerUsageError("the empty subset has no size")
        if len(key) == 1:
            (name,) = key
            result = self.pages(name)
        else:
            j = min(key, key=lambda name: (len(self.pages(name)), name))
            rest = key - {j}
            result = self._combine(self.size(rest), self.pages(j), self.selectivity(j, rest))
        self._sizes[key] = result
        return result

    def _combine(
        self,
        composite: BucketedDistribution,
        base: BucketedDistribution,
        sigma: BucketedDistribution,
    ) -> BucketedDistribution:
        budget = self.config.rebucket_budget
        if budget is None:
            return product_of((composite, base, sigma))
        inputs = (composite, base, sigma)
        if self.config.cube_root_rebucket:
            # a ceil(cbrt(k))-bucket input triple can still exceed k
            per_input = ceil(float(np.cbrt(budget)))
            inputs = tuple(rebucket(d, per_input) for d in inputs)
        product = product_of(inputs)
        coarse = rebucket(product, budget)
        if len(coarse) != len(product):
            logger.debug("result size rebucketed: %d -> %d buckets", len(product), len(coarse))
        return coarse

    def requires_final_sort(self, order: Sequence[str], methods: Sequence[JoinMethod]) -> bool:
        """Whether a plan must sort its result to meet the ordering requirement.

        The last join delivers the order only when it is a sort-merge on a
        column of the ordering relation, that is when no owner is named, the
        owner is the last joined relation, or the owner is joined to it by a
        predicate.
        """

        query = self.query
        if not query.sorted_result_required:
            return False
        if not methods:
            return True
        if not methods[-1].emits_sorted:
            return True
        owner = query.order_column_owner
        last = order[-1]
        return not (owner is None or owner == last or query.connected(owner, last))

    def join_cost(
        self,
        memories: Sequence[BucketedDistribution],
        method: JoinMethod,
        composite: Subset,
        j: str,
    ) -> float:
        """Expected cost of joining ``composite`` (outer) with base relation ``j``.

        The join is phase ``len(composite)``; its memory is
        ``memories[len(composite) - 1]``.
        """

        memory = memories[len(composite) - 1]
        outer, inner = self.size(composite), self.pages(j)
        if self.config.auto_buckets:
            memory = coarsen_memory(memory, method, outer, inner)
        return expected_join_cost(method, memory, outer, inner)

    def sort_cost(self, memories: Sequence[BucketedDistribution]) -> float:
        """Expected cost of sorting the full result in the phase after the last join."""

        return expected_sort_cost(memories[self.n - 1], self.size(self.everything))

    def scan_cost(self) -> float:
        """Cost of a single-relation plan: one read of the relation."""

        (name,) = self.query.relations
        return expectation(self.pages(name))

    def phase_memories(self, environment: Environment) -> tuple[BucketedDistribution, ...]:
        """Memory distribution of each phase: every join, then the final sort."""

        return phase_memories(environment, self.n)

    def check_plan(self, plan: Plan) -> None:
        """Raise :class:`PlanError` unless ``plan`` covers exactly the query relations."""

        if set(plan.order) != set(self.query.relations):
            raise PlanError(
                f"plan relations {sorted(plan.order)} differ from query relations {sorted(self.query.relations)}"
            )
        if plan.final_sort != self.requires_final_sort(plan.order, plan.methods):
            raise PlanError(
                f"final_sort={plan.final_sort} is inconsistent with the ordering requirement"
            )


def phase_memories(environment: Environment, n: int) -> tuple[BucketedDistribution, ...]:
    """Return ``n`` memory distributions: ``n - 1`` join phases and the sort phase.

    Static memory repeats the same distribution; dynamic memory advances the
    initial distribution one transition step per phase.
    """

    count = max(n, 1)
    if environment.transition is None:
        return (environment.memory,) * count
    return tuple(advance(environment.memory, environment.transition, step) for step in range(count))


def point_memories(value: float, n: int) -> tuple[BucketedDistribution, ...]:
    """Return ``n`` copies of the point distribution at memory ``value``."""

    if not np.isfinite(value) or value <= 0.0:
        raise OptimizerUsageError(f"fixed memory must be positive, got {value!r}")
    return (point(value),) * max(n, 1)


def evaluate_plan(
    plan: Plan, problem: Problem, memory_by_phase: Sequence[BucketedDistribution]
) -> Plan:
    """Return ``plan`` annotated with its expected phase costs under ``memory_by_phase``."""

    problem.check_plan(plan)
    if len(memory_by_phase) < problem.n:
        raise OptimizerUsageError(f"{problem.n} phase memories are required, got {len(memory_by_phase)}")
    phases: list[float] = []
    if problem.n == 1:
        phases.append(problem.scan_cost())
    else:
        for k in range(1, problem.n):
            phases.append(
                problem.join_cost(memory_by_phase, plan.methods[k - 1], frozenset(plan.order[:k]), plan.order[k])
            )
    if plan.final_sort:
        phases.append(problem.sort_cost(memory_by_phase))
    return plan.with_costs(phases)


__all__ = [
    "OptimizerUsageError",
    "Problem",
    "Subset",
    "evaluate_plan",
    "phase_memories",
    "point_memories",
]
