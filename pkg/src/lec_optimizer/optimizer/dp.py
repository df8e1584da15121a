"""Subset dynamic program over left-deep plans.

Every optimizer in the package is one configuration of :func:`run_dp`: the
problem fixes how sizes are modeled, ``memories`` fixes the memory
distribution of each phase, and ``top_c`` fixes how many subplans survive
at each node of the subset lattice.
"""

from __future__ import annotations

import heapq
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations

from ..core.distributions import BucketedDistribution
from ..costs.formulas import JoinMethod
from .plan import Plan
from .problem import OptimizerUsageError, Problem, Subset
from .topc import top_c_merge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlanTableEntry:
    """Best (or top-c) subplans for one subset, ascending by expected cost."""

    subset: Subset
    plans: tuple[Plan, ...]
    result_size: BucketedDistribution
    memory_at_node: BucketedDistribution | None
    examined_pairs: int = 0

    @property
    def best(self) -> Plan:
        """The cheapest retained subplan."""

        return self.plans[0]

    @property
    def exp_cost(self) -> float:
        """Expected cost of the cheapest retained subplan."""

        cost = self.best.expected_cost
        return 0.0 if cost is None else cost


PlanTable = dict[Subset, PlanTableEntry]


@dataclass(frozen=True)
class DPResult:
    """Outcome of one dynamic-programming pass."""

    plans: tuple[Plan, ...]
    table: PlanTable
    examined_pairs: int

    @property
    def best(self) -> Plan:
        """The cheapest complete plan."""

        return self.plans[0]


def _leaf(name: str) -> Plan:
    return Plan(order=(name,), methods=()).with_costs(())


@dataclass(frozen=True)
class _Extension:
    """Joining one base relation with one method, plus the root sort it forces."""

    method: JoinMethod
    join: float
    sort: float | None
    cost: float


def _extensions(
    problem: Problem,
    memories: Sequence[BucketedDistribution],
    rest: Subset,
    j: str,
    is_root: bool,
    sort_cost: float,
) -> list[_Extension]:
    """Per-method costs of adding ``j`` to ``rest``, ascending, ties by method rank.

    Whether the root must sort depends only on the last relation and method,
    so the same list serves every subplan of ``rest``.
    """

    steps = []
    for method in JoinMethod:
        join = problem.join_cost(memories, method, rest, j)
        if is_root and problem.requires_final_sort((j,), (method,)):
            steps.append(_Extension(method, join, sort_cost, join + sort_cost))
        else:
            steps.append(_Extension(method, join, None, join))
    return sorted(steps, key=lambda step: (step.cost, step.method.rank))


def _extend(sub: Plan, j: str, step: _Extension) -> Plan:
    phases = [*sub.per_phase_costs, step.join]
    if step.sort is not None:
        phases.append(step.sort)
    plan = Plan(order=(*sub.order, j), methods=(*sub.methods, step.method), final_sort=step.sort is not None)
    return plan.with_costs(phases)


def run_dp(problem: Problem, memories: Sequence[BucketedDistribution], top_c: int = 1) -> DPResult:
    """Build the plan table bottom-up and return the ``top_c`` cheapest complete plans.

    A subset ``S`` of size ``k`` is reached from each ``S - {j}`` by joining
    base relation ``j`` in phase ``k - 1``.  For each ``j``, the retained
    subplans of ``S - {j}`` and the per-method extension costs are combined by
    :func:`top_c_merge`, so only pairs that can reach the top ``c`` are built.
    Candidates are ranked by expected cost, ties by :attr:`Plan.tie_key`.
    """

    if top_c < 1:
        raise OptimizerUsageError("top_c must be at least one")
    if len(memories) < problem.n:
        raise OptimizerUsageError(f"{problem.n} phase memories are required, got {len(memories)}")
    names = problem.relations
    n = len(names)

    if n == 1:
        plan = Plan(order=names, methods=(), final_sort=problem.requires_final_sort(names, ()))
        phases = [problem.scan_cost()]
        if plan.final_sort:
            phases.append(problem.sort_cost(memories))
        plan = plan.with_costs(phases)
        entry = PlanTableEntry(problem.everything, (plan,), problem.size(problem.everything), memories[0])
        return DPResult((plan,), {problem.everything: entry}, 0)

    table: PlanTable = {
        frozenset((name,)): PlanTableEntry(
            frozenset((name,)), (_leaf(name),), problem.size((name,)), None
        )
        for name in names
    }
    sort_cost = problem.sort_cost(memories) if problem.query.sorted_result_required else 0.0
    examined = 0
    for k in range(2, n + 1):
        is_root = k == n
        for members in combinations(names, k):
            subset = frozenset(members)
            candidates: list[Plan] = []
            node_examined = 0
            for j in members:
                rest = subset - {j}
                sub_plans = table[rest].plans
                steps = _extensions(problem, memories, rest, j, is_root, sort_cost)
                merged = top_c_merge(
                    [p.expected_cost or 0.0 for p in sub_plans], [step.cost for step in steps], top_c
                )
                node_examined += merged.examined
                for left, right in merged.pairs:
                    candidates.append(_extend(sub_plans[left], j, steps[right]))
            examined += node_examined
            kept = tuple(heapq.nsmallest(top_c, candidates, key=lambda plan: plan.sort_key))
            table[subset] = PlanTableEntry(
                subset, kept, problem.size(subset), memories[k - 2], node_examined
            )
            logger.debug(
                "node {%s}: best %s via %s, expected cost %.6g",
                ",".join(members),
                kept[0].order[-1],
                kept[0].methods[-1].value,
                kept[0].expected_cost,
            )
    root = table[problem.everything]
    return DPResult(root.plans, table, examined)


__all__ = ["DPResult", "PlanTable", "PlanTableEntry", "run_dp"]
