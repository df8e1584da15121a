"""Expected join and sort costs under independent bucketed parameters.

The generic evaluator sums a formula over every (memory, outer, inner)
triple of representatives.  The fast evaluators reach the same value in time
linear in the total number of buckets: they split the outer/inner product
into the ``a <= b`` and ``a > b`` halves, so that the size keying each
formula is fixed inside each half, and read the remaining probabilities and
conditional means from :class:`~lec_optimizer.core.distributions.PrefixTables`.
Ties ``a == b`` always go to the ``a <= b`` half.

Throughout, ``dA`` is the outer (composite) input and ``dB`` the inner
(base) input of the join.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ..core.distributions import (
    BucketedDistribution,
    PrefixTables,
    VisitCounter,
    prefix_tables,
)
from .formulas import FORMULAS, CostFormula, JoinMethod, external_sort_cost


def expected_cost_generic(
    formula: JoinMethod | CostFormula,
    dM: BucketedDistribution,
    dA: BucketedDistribution,
    dB: BucketedDistribution,
) -> float:
    """Return ``sum formula(a, b, m) Pr(a) Pr(b) Pr(m)`` over all representative triples."""

    fn = FORMULAS[formula] if isinstance(formula, JoinMethod) else formula
    costs = fn(dA.reps[:, None, None], dB.reps[None, :, None], dM.reps[None, None, :])
    weights = (
        dA.probs[:, None, None] * dB.probs[None, :, None] * dM.probs[None, None, :]
    )
    return float(np.sum(costs * weights))


def expected_sort_cost(dM: BucketedDistribution, dR: BucketedDistribution) -> float:
    """Expected external-sort cost of a result of size ``dR`` under memory ``dM``."""

    costs = external_sort_cost(dR.reps[:, None], dM.reps[None, :])
    return float(np.sum(costs * (dR.probs[:, None] * dM.probs[None, :])))


def _pass_thresholds(keys: Iterable[float]) -> tuple[dict[float, tuple[float, float]], list[float]]:
    """Square and cube-root breakpoints per key, plus their sorted union.

    The lower breakpoint is clipped to the upper one, which only matters for
    keys below one page where the cube root exceeds the square root.
    """

    per_key: dict[float, tuple[float, float]] = {}
    for key in keys:
        upper = float(np.sqrt(key))
        lower = min(float(np.cbrt(key)), upper)
        per_key[key] = (lower, upper)
    flat = sorted({t for pair in per_key.values() for t in pair})
    return per_key, flat


def _expected_passes(memory: PrefixTables, lower: float, upper: float) -> float:
    """``E[2, 4 or 6]`` for memory above ``upper``, in ``(lower, upper]`` or at most ``lower``."""

    at_most_lower = memory.leq_at[lower]
    return (
        2.0 * memory.gt_at[upper]
        + 4.0 * (memory.leq_at[upper] - at_most_lower)
        + 6.0 * at_most_lower
    )


def expected_cost_sort_merge_fast(
    dM: BucketedDistribution,
    dA: BucketedDistribution,
    dB: BucketedDistribution,
    *,
    counter: VisitCounter | None = None,
) -> float:
    """Linear-time expected sort-merge cost.

    With ``K(L)`` the expected pass factor at key ``L``::

        sum_b Pr(b) Pr(A <= b) (E[A | A <= b] + b) K(b)
      + sum_a Pr(a) Pr(B <  a) (a + E[B | B < a]) K(a)
    """

    a_reps, b_reps = dA.reps.tolist(), dB.reps.tolist()
    outer = prefix_tables(dA, b_reps, counter=counter)
    inner = prefix_tables(dB, a_reps, counter=counter)
    breakpoints, flat = _pass_thresholds(sorted(set(a_reps) | set(b_reps)))
    memory = prefix_tables(dM, flat, counter=counter)

    total = 0.0
    for b, pb in zip(b_reps, dB.probs.tolist()):
        mass = outer.leq_at[b]
        if mass > 0.0:
            total += pb * mass * (outer.cond_mean_leq[b] + b) * _expected_passes(memory, *breakpoints[b])
    for a, pa in zip(a_reps, dA.probs.tolist()):
        mass = inner.lt_at[a]
        if mass > 0.0:
            total += pa * mass * (a + inner.cond_mean_lt[a]) * _expected_passes(memory, *breakpoints[a])
    if counter is not None:
        counter.add(len(a_reps) + len(b_reps))
    return total


def expected_cost_grace_hash_fast(
    dM: BucketedDistribution,
    dA: BucketedDistribution,
    dB: BucketedDistribution,
    *,
    counter: VisitCounter | None = None,
) -> float:
    """Linear-time expected Grace hash cost, keyed to the smaller input::

        sum_a Pr(a) Pr(B >= a) (a + E[B | B >= a]) K(a)
      + sum_b Pr(b) Pr(A >  b) (E[A | A > b] + b) K(b)
    """

    a_reps, b_reps = dA.reps.tolist(), dB.reps.tolist()
    outer = prefix_tables(dA, b_reps, counter=counter)
    inner = prefix_tables(dB, a_reps, counter=counter)
    breakpoints, flat = _pass_thresholds(sorted(set(a_reps) | set(b_reps)))
    memory = prefix_tables(dM, flat, counter=counter)

    total = 0.0
    for a, pa in zip(a_reps, dA.probs.tolist()):
        mass = inner.geq_at[a]
        if mass > 0.0:
            total += pa * mass * (a + inner.cond_mean_geq[a]) * _expected_passes(memory, *breakpoints[a])
    for b, pb in zip(b_reps, dB.probs.tolist()):
        mass = outer.gt_at[b]
        if mass > 0.0:
            total += pb * mass * (outer.cond_mean_gt[b] + b) * _expected_passes(memory, *breakpoints[b])
    if counter is not None:
        counter.add(len(a_reps) + len(b_reps))
    return total


def expected_cost_nested_loop_fast(
    dM: BucketedDistribution,
    dA: BucketedDistribution,
    dB: BucketedDistribution,
    *,
    counter: VisitCounter | None = None,
) -> float:
    """Linear-time expected page nested-loop cost.

    With ``q(s) = Pr(M >= s + 2)`` the one-pass probability at smaller input
    ``s``, ``G_a = E[B | B >= a]`` and ``H_b = E[A | A > b]``::

        sum_a Pr(a) Pr(B >= a) [(a + G_a) q(a) + (a + a G_a) (1 - q(a))]
      + sum_b Pr(b) Pr(A >  b) [(H_b + b) q(b) + (H_b + H_b b) (1 - q(b))]
    """

    a_reps, b_reps = dA.reps.tolist(), dB.reps.tolist()
    outer = prefix_tables(dA, b_reps, counter=counter)
    inner = prefix_tables(dB, a_reps, counter=counter)
    memory = prefix_tables(dM, sorted({s + 2.0 for s in set(a_reps) | set(b_reps)}), counter=counter)

    total = 0.0
    for a, pa in zip(a_reps, dA.probs.tolist()):
        mass = inner.geq_at[a]
        if mass > 0.0:
            g = inner.cond_mean_geq[a]
            fits, spills = memory.geq_at[a + 2.0], memory.lt_at[a + 2.0]
            total += pa * mass * ((a + g) * fits + (a + a * g) * spills)
    for b, pb in zip(b_reps, dB.probs.tolist()):
        mass = outer.gt_at[b]
        if mass > 0.0:
            h = outer.cond_mean_gt[b]
            fits, spills = memory.geq_at[b + 2.0], memory.lt_at[b + 2.0]
            total += pb * mass * ((h + b) * fits + (h + h * b) * spills)
    if counter is not None:
        counter.add(len(a_reps) + len(b_reps))
    return total


FAST_EVALUATORS = {
    JoinMethod.SORT_MERGE: expected_cost_sort_merge_fast,
    JoinMethod.GRACE_HASH: expected_cost_grace_hash_fast,
    JoinMethod.PAGE_NESTED_LOOP: expected_cost_nested_loop_fast,
}


def expected_join_cost(
    method: JoinMethod,
    dM: BucketedDistribution,
    dA: BucketedDistribution,
    dB: BucketedDistribution,
    *,
    counter: VisitCounter | None = None,
) -> float:
    """Expected cost of ``method``; point inputs use the formula directly."""

    if dM.is_point and dA.is_point and dB.is_point:
        return float(FORMULAS[method](dA.reps[0], dB.reps[0], dM.reps[0]))
    return FAST_EVALUATORS[method](dM, dA, dB, counter=counter)


__all__ = [
    "FAST_EVALUATORS",
    "expected_cost_generic",
    "expected_cost_grace_hash_fast",
    "expected_cost_nested_loop_fast",
    "expected_cost_sort_merge_fast",
    "expected_join_cost",
    "expected_sort_cost",
]
