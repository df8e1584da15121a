"""Brute-force ground truth for the optimizers.

The oracle enumerates every left-deep plan and evaluates it against the full
joint space of base page counts, predicate selectivities and memory (a
single value under static memory, a whole phase-by-phase sequence under
drifting memory).  Intermediate result sizes are recomputed at every joint
point along the plan's own join order; nothing is bucketed or propagated.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import permutations, product
from math import factorial, prod

import numpy as np

from ..catalog.model import Catalog, Environment, QuerySpec
from ..core.config import OracleLimits
from ..core.distributions import BucketedDistribution, collapse_to_mean
from ..costs.formulas import JoinMethod, external_sort_cost, join_cost
from ..optimizer.plan import Plan
from ..optimizer.problem import Problem

logger = logging.getLogger(__name__)

METHODS = tuple(JoinMethod)


class OracleRefusal(RuntimeError):
    """Raised instead of running an enumeration above the configured limits."""

    def __init__(self, limit: str, requested: int, allowed: int) -> None:
        """Record which limit was exceeded and by how much."""

        self.limit = limit
        self.requested = requested
        self.allowed = allowed
        super().__init__(f"oracle refused: {limit} would be {requested:,}, limit is {allowed:,}")


@dataclass(frozen=True)
class JointSpace:
    """Every joint parameter point with its probability.

    ``memory[t]`` holds the memory of phase slot ``t`` (joins first, then the
    final sort) at every point.
    """

    pages: dict[str, np.ndarray]
    selectivities: tuple[np.ndarray, ...]
    memory: tuple[np.ndarray, ...]
    probs: np.ndarray

    def __len__(self) -> int:
        return int(self.probs.shape[0])


@dataclass(frozen=True)
class OracleResult:
    """Cheapest plan found by exhaustive enumeration."""

    best: Plan
    plan_count: int
    joint_points: int
    ranked: tuple[Plan, ...] = ()

    def to_public_dict(self) -> dict[str, object]:
        """Return the JSON payload ``{best, plans?}``."""

        payload: dict[str, object] = {
            "best": self.best.to_public_dict(),
            "plan_count": self.plan_count,
            "joint_points": self.joint_points,
        }
        if self.ranked:
            payload["plans"] = [plan.to_public_dict() for plan in self.ranked]
        return payload


def _check_relations(n: int, limits: OracleLimits) -> None:
    if n > limits.max_relations:
        raise OracleRefusal("max_relations", n, limits.max_relations)


def enumerate_left_deep(problem: Problem, limits: OracleLimits | None = None) -> Iterator[Plan]:
    """Yield all ``n! * 3**(n-1)`` left-deep plans with their required final sort."""

    limits = limits or OracleLimits()
    _check_relations(problem.n, limits)
    for order in permutations(problem.relations):
        for methods in product(METHODS, repeat=problem.n - 1):
            yield Plan(order=order, methods=methods, final_sort=problem.requires_final_sort(order, methods))


def plan_count(n: int) -> int:
    """Number of left-deep plans over ``n`` relations."""

    return factorial(n) * len(METHODS) ** (n - 1)


def memory_slots(query: QuerySpec) -> int:
    """Phase slots that need a memory value: every join, plus the sort when one can occur."""

    return max(len(query.relations) - 1 + int(query.sorted_result_required), 1)


def _memory_factor(environment: Environment, slots: int) -> tuple[np.ndarray, np.ndarray]:
    memory = environment.memory
    if environment.transition is None:
        return memory.reps[:, None], memory.probs
    states = np.asarray(environment.transition.states)
    matrix = environment.transition.matrix
    probs = memory.probs.copy()
    paths = np.arange(len(states))[:, None]
    for _ in range(slots - 1):
        last = paths[:, -1]
        probs = (probs[:, None] * matrix[last]).ravel()
        paths = np.concatenate(
            (np.repeat(paths, len(states), axis=0), np.tile(np.arange(len(states)), len(last))[:, None]),
            axis=1,
        )
    return states[paths], probs


def build_joint_space(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    limits: OracleLimits | None = None,
    collapse: bool = False,
) -> JointSpace:
    """Cartesian product of every independent parameter, refused above the point limit."""

    limits = limits or OracleLimits()

    def model(d: BucketedDistribution) -> BucketedDistribution:
        return collapse_to_mean(d) if collapse else d

    names = tuple(sorted(query.relations))
    slots = memory_slots(query)
    factors: list[tuple[np.ndarray, np.ndarray]] = [
        (model(catalog.relation(name).pages).reps[:, None], model(catalog.relation(name).pages).probs)
        for name in names
    ]
    factors += [
        (model(p.selectivity).reps[:, None], model(p.selectivity).probs) for p in query.predicates
    ]
    factors.append(_memory_factor(environment, slots))
    shape = tuple(len(probs) for _, probs in factors)
    total = prod(shape)
    if total > limits.max_joint_points:
        raise OracleRefusal("max_joint_points", total, limits.max_joint_points)

    index = np.unravel_index(np.arange(total), shape)
    columns = [values[idx] for (values, _), idx in zip(factors, index)]
    probs = np.ones(total)
    for (_, weights), idx in zip(factors, index):
        probs = probs * weights[idx]
    memory = columns[-1]
    return JointSpace(
        pages={name: columns[i][:, 0] for i, name in enumerate(names)},
        selectivities=tuple(columns[len(names) + i][:, 0] for i in range(len(query.predicates))),
        memory=tuple(memory[:, min(t, memory.shape[1] - 1)] for t in range(slots)),
        probs=probs,
    )


def _step_size(space: JointSpace, query: QuerySpec, size: np.ndarray, joined: Sequence[str], j: str) -> np.ndarray:
    result = size * space.pages[j]
    for index, predicate in enumerate(query.predicates):
        if predicate.touches(j) and predicate.other(j) in joined:
            result = result * space.selectivities[index]
    return result


def _join_phase_costs(
    space: JointSpace, query: QuerySpec, order: Sequence[str]
) -> tuple[list[np.ndarray], np.ndarray]:
    """Per join, a ``(3, points)`` array of costs under each method; plus the final size."""

    size = space.pages[order[0]]
    phases: list[np.ndarray] = []
    for k in range(1, len(order)):
        j = order[k]
        memory = space.memory[k - 1]
        phases.append(np.stack([join_cost(method, size, space.pages[j], memory) for method in METHODS]))
        size = _step_size(space, query, size, order[:k], j)
    return phases, size


def realized_costs(plan: Plan, space: JointSpace, query: QuerySpec) -> np.ndarray:
    """Cost of ``plan`` at every point of ``space``, sizes derived along the plan's order."""

    n = len(plan.order)
    if n == 1:
        total = space.pages[plan.order[0]].copy()
        size = space.pages[plan.order[0]]
    else:
        phases, size = _join_phase_costs(space, query, plan.order)
        total = np.zeros(len(space))
        for k, method in enumerate(plan.methods):
            total = total + phases[k][METHODS.index(method)]
    if plan.final_sort:
        total = total + external_sort_cost(size, space.memory[n - 1])
    return total


def exact_expected_cost(
    plan: Plan,
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    limits: OracleLimits | None = None,
    collapse: bool = False,
) -> float:
    """``sum_v C(plan, v) Pr(v)`` over the full joint space."""

    Problem(catalog, query).check_plan(plan)
    space = build_joint_space(catalog, query, environment, limits=limits, collapse=collapse)
    return float(realized_costs(plan, space, query) @ space.probs)


def _costed(order: tuple[str, ...], picks: Sequence[int], table: np.ndarray, sort_expected: float | None) -> Plan:
    methods = tuple(METHODS[i] for i in picks)
    per_phase = [float(table[k, i]) for k, i in enumerate(picks)] if picks else [float(table[0, 0])]
    if sort_expected is not None:
        per_phase.append(sort_expected)
    return Plan(order=order, methods=methods, final_sort=sort_expected is not None).with_costs(per_phase)


def oracle_best(
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    *,
    limits: OracleLimits | None = None,
    collapse: bool = False,
    keep_ranking: bool = False,
) -> OracleResult:
    """Return the least-expected-cost plan over every left-deep plan.

    For each join order, the expected cost of every join under every method
    is summed over the joint space once, giving a ``(n - 1) x 3`` table from
    which all ``3**(n-1)`` method combinations of that order are costed at
    once.  Totals accumulate phase by phase from zero, exactly as
    :meth:`Plan.with_costs` sums them, and ties are broken exactly as the
    optimizers break them.
    """

    limits = limits or OracleLimits()
    problem = Problem(catalog, query)
    _check_relations(problem.n, limits)
    space = build_joint_space(catalog, query, environment, limits=limits, collapse=collapse)
    n = problem.n
    # rows in lexicographic order of method ranks, so argmin picks the tie-break winner
    combos = list(product(range(len(METHODS)), repeat=n - 1))
    picks = np.array(combos, dtype=int).reshape(len(combos), n - 1)
    best: Plan | None = None
    ranked: list[Plan] = []
    count = 0

    for order in permutations(problem.relations):
        if n == 1:
            size = space.pages[order[0]]
            table = np.array([[float(size @ space.probs)]])
        else:
            phases, size = _join_phase_costs(space, query, order)
            table = np.stack([costs @ space.probs for costs in phases])
        sort_expected = 0.0
        if query.sorted_result_required:
            sort_expected = float(external_sort_cost(size, space.memory[n - 1]) @ space.probs)

        if n == 1:
            totals = np.array([0.0 + table[0, 0]])
            needs_sort = np.array([problem.requires_final_sort(order, ())])
        else:
            totals = np.zeros(len(picks))
            for k in range(n - 1):
                totals = totals + table[k, picks[:, k]]
            last = np.array([problem.requires_final_sort(order, (method,)) for method in METHODS])
            needs_sort = last[picks[:, -1]]
        totals = np.where(needs_sort, totals + sort_expected, totals)
        count += len(totals)

        if keep_ranking:
            ranked.extend(
                _costed(order, tuple(row), table, sort_expected if needs_sort[r] else None)
                for r, row in enumerate(picks.tolist())
            )
        winner = int(np.argmin(totals))
        if best is None or totals[winner] < best.expected_cost:
            row = tuple(picks[winner].tolist())
            best = _costed(order, row, table, sort_expected if needs_sort[winner] else None)

    if best is None:
        raise RuntimeError("oracle enumerated no plans")
    logger.info("oracle: %d plans over %d joint points, best %.2f", count, len(space), best.expected_cost)
    ranking = tuple(sorted(ranked, key=lambda plan: plan.sort_key)) if keep_ranking else ()
    return OracleResult(best=best, plan_count=count, joint_points=len(space), ranked=ranking)


__all__ = [
    "JointSpace",
    "OracleRefusal",
    "OracleResult",
    "build_joint_space",
    "enumerate_left_deep",
    "exact_expected_cost",
    "memory_slots",
    "oracle_best",
    "plan_count",
    "realized_costs",
]
