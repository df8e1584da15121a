"""Top-c merge of two ascending cost lists."""

from __future__ import annotations

import heapq
from collections.abc import Sequence
from dataclasses import dataclass

from .problem import OptimizerUsageError


@dataclass(frozen=True)
class TopCMerge:
    """The ``c`` smallest pairwise sums and the pairs that produced them.

    ``pairs`` holds zero-based ``(left, right)`` indices aligned with
    ``sums``; ``examined`` counts every pair whose sum was formed.
    """

    sums: tuple[float, ...]
    pairs: tuple[tuple[int, int], ...]
    examined: int


def top_c_merge(left_costs: Sequence[float], right_costs: Sequence[float], c: int) -> TopCMerge:
    """Return the ``c`` smallest sums ``left[i] + right[k]``.

    Both lists must be ascending.  The pair at one-based position ``(i, k)``
    is dominated by the ``i * k`` pairs above and to its left, so only pairs
    with ``i * k <= c`` can be among the smallest ``c``; no other pair is
    formed.  Ties are ordered by ``(i, k)``.
    """

    if c < 1:
        raise OptimizerUsageError("top-c merge needs c >= 1")
    for name, values in (("left_costs", left_costs), ("right_costs", right_costs)):
        if any(b < a for a, b in zip(values, values[1:])):
            raise OptimizerUsageError(f"{name} must be sorted ascending")
    candidates: list[tuple[float, int, int]] = []
    for i in range(1, min(c, len(left_costs)) + 1):
        for k in range(1, min(c // i, len(right_costs)) + 1):
            candidates.append((left_costs[i - 1] + right_costs[k - 1], i - 1, k - 1))
    best = heapq.nsmallest(c, candidates)
    return TopCMerge(
        sums=tuple(total for total, _, _ in best),
        pairs=tuple((i, k) for _, i, k in best),
        examined=len(candidates),
    )


__all__ = ["TopCMerge", "top_c_merge"]
