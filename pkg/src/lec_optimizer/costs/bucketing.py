"""Memory bucketing at the points where a join formula changes branch."""

from __future__ import annotations

import logging

import numpy as np

from ..core.distributions import BucketedDistribution, coalesce
from .formulas import JoinMethod

logger = logging.getLogger(__name__)


def derive_memory_buckets(
    method: JoinMethod, dA: BucketedDistribution, dB: BucketedDistribution
) -> list[float]:
    """Return the sorted memory values at which ``method``'s cost can change.

    Sort-merge breaks at ``cbrt(L)`` and ``sqrt(L)`` of the larger input,
    Grace hash at the same roots of the smaller input, and the nested loop
    at ``S + 2``.  Every pair of size representatives contributes.
    """

    a, b = np.meshgrid(dA.reps, dB.reps, indexing="ij")
    if method is JoinMethod.PAGE_NESTED_LOOP:
        points = np.minimum(a, b) + 2.0
    else:
        key = np.maximum(a, b) if method is JoinMethod.SORT_MERGE else np.minimum(a, b)
        points = np.concatenate((np.cbrt(key).ravel(), np.sqrt(key).ravel()))
    return np.unique(points).tolist()


def coarsen_memory(
    dM: BucketedDistribution,
    method: JoinMethod,
    dA: BucketedDistribution,
    dB: BucketedDistribution,
) -> BucketedDistribution:
    """Merge memory buckets that fall in the same branch of ``method`` for every size pair.

    A memory value's branch is the number of breakpoints it exceeds (reaches,
    for the nested loop, whose test is ``m >= S + 2``).  Buckets sharing a
    branch have identical costs, so merging them into their probability
    weighted mean leaves every expected cost unchanged.
    """

    breakpoints = np.asarray(derive_memory_buckets(method, dA, dB))
    # "left" counts breakpoints strictly below m, "right" those at or below m
    side = "right" if method is JoinMethod.PAGE_NESTED_LOOP else "left"
    labels = np.searchsorted(breakpoints, dM.reps, side=side)
    coarse = coalesce(dM, labels.tolist())
    if len(coarse) != len(dM):
        logger.debug("memory coarsened for %s: %d -> %d buckets", method.value, len(dM), len(coarse))
    return coarse


__all__ = ["coarsen_memory", "derive_memory_buckets"]
