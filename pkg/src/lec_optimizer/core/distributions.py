"""Bucketed probability distributions over run-time parameters.

A :class:`BucketedDistribution` approximates a random parameter (available
memory, a relation's page count, a predicate selectivity) by an ordered list of
non-overlapping half-open buckets ``[lo, hi)``.  Each bucket carries a
representative ``rep`` and a probability mass ``prob``; every computation in
the optimizer treats the parameter as taking the value ``rep`` with
probability ``prob``.  Comparisons such as ``X <= t`` are therefore evaluated
on representatives.

All values are immutable after construction and every operation is a pure
function, so distributions may be shared freely between optimizer instances.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import reduce
from math import inf, isfinite, isinf, nextafter
from typing import Any

import numpy as np

SUM_TOLERANCE = 1e-9
NORMALIZE_TOLERANCE = 1e-6


class DistributionError(ValueError):
    """Raised when a distribution violates its invariants or a domain bound."""


class DistributionUsageError(DistributionError):
    """Raised when an operation is called outside its contract."""


@dataclass
class VisitCounter:
    """Mutable element-visit counter used to audit linear-time sweeps."""

    visits: int = 0

    def add(self, count: int = 1) -> None:
        """Record ``count`` element visits."""

        self.visits += count


@dataclass(frozen=True, slots=True)
class Bucket:
    """One bucket ``[lo, hi)`` with representative ``rep`` and mass ``prob``."""

    lo: float
    hi: float
    rep: float
    prob: float

    def to_public_dict(self) -> dict[str, float | str]:
        """Return the JSON form; an unbounded ``hi`` is written as ``"inf"``."""

        return {
            "lo": self.lo,
            "hi": "inf" if isinf(self.hi) else self.hi,
            "rep": self.rep,
            "prob": self.prob,
        }


def _readonly(values: Iterable[float]) -> np.ndarray:
    array = np.fromiter(values, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class BucketedDistribution:
    """Discrete approximation of a random parameter.

    Construction validates ordering, representative placement and probability
    mass.  Masses whose total lies within ``NORMALIZE_TOLERANCE`` of one are
    renormalized; anything further off is rejected.
    """

    buckets: tuple[Bucket, ...]
    reps: np.ndarray = field(init=False, repr=False, compare=False)
    probs: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, buckets: Iterable[Bucket]) -> None:
        """Validate and normalize ``buckets`` into an immutable distribution."""

        items = tuple(buckets)
        if not items:
            raise DistributionError("a distribution needs at least one bucket")
        total = 0.0
        for index, bucket in enumerate(items):
            if not (isfinite(bucket.lo) and isfinite(bucket.rep) and isfinite(bucket.prob)):
                raise DistributionError(f"bucket {index} has non-finite lo, rep or prob")
            if bucket.hi != inf and not isfinite(bucket.hi):
                raise DistributionError(f"bucket {index} has an invalid upper bound")
            if not bucket.lo <= bucket.rep < bucket.hi:
                raise DistributionError(
                    f"bucket {index}: representative {bucket.rep} outside [{bucket.lo}, {bucket.hi})"
                )
            if bucket.prob < 0.0:
                raise DistributionError(f"bucket {index} has negative probability")
            if index and items[index - 1].hi > bucket.lo:
                raise DistributionError(
                    f"buckets {index - 1} and {index} overlap or are out of order"
                )
            total += bucket.prob
        if abs(total - 1.0) > NORMALIZE_TOLERANCE:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        if total != 1.0:
            items = tuple(
                Bucket(b.lo, b.hi, b.rep, b.prob / total) for b in items
            )
        object.__setattr__(self, "buckets", items)
        object.__setattr__(self, "reps", _readonly(b.rep for b in items))
        object.__setattr__(self, "probs", _readonly(b.prob for b in items))

    def __len__(self) -> int:
        """Return the number of buckets."""

        return len(self.buckets)

    @property
    def is_point(self) -> bool:
        """Whether the distribution is a single point mass."""

        return len(self.buckets) == 1

    @property
    def mean(self) -> float:
        """Probability-weighted mean of the representatives."""

        return expectation(self)

    def to_public_list(self) -> list[dict[str, float | str]]:
        """Return the JSON array form ``[{lo, hi, rep, prob}, ...]``."""

        return [bucket.to_public_dict() for bucket in self.buckets]


def from_public_list(items: Sequence[Mapping[str, Any]]) -> BucketedDistribution:
    """Build a distribution from its JSON array form."""

    buckets = []
    for item in items:
        hi = item["hi"]
        buckets.append(
            Bucket(
                lo=float(item["lo"]),
                hi=inf if hi == "inf" else float(hi),
                rep=float(item["rep"]),
                prob=float(item["prob"]),
            )
        )
    return BucketedDistribution(buckets)


def point(value: float, *, nonnegative: bool = True) -> BucketedDistribution:
    """Return the one-bucket distribution ``[value, value+eps)`` with mass one."""

    value = float(value)
    if not isfinite(value):
        raise DistributionError(f"point value must be finite, got {value!r}")
    if nonnegative and value < 0.0:
        raise DistributionError(f"point value must be non-negative, got {value!r}")
    return BucketedDistribution([Bucket(value, nextafter(value, inf), value, 1.0)])


def point_masses(values: Sequence[float] | np.ndarray, probs: Sequence[float] | np.ndarray) -> BucketedDistribution:
    """Return a distribution of point masses; equal values are merged.

    Masses of exactly zero are dropped.
    """

    values = np.asarray(values, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    if values.shape != probs.shape:
        raise DistributionUsageError("values and probs must have the same length")
    keep = probs != 0.0
    if not np.any(keep):
        raise DistributionError("point masses carry no probability")
    unique, inverse = np.unique(values[keep], return_inverse=True)
    merged = np.bincount(inverse, weights=probs[keep])
    return BucketedDistribution(
        Bucket(float(v), nextafter(float(v), inf), float(v), float(p))
        for v, p in zip(unique, merged)
    )


def discrete(masses: Mapping[float, float]) -> BucketedDistribution:
    """Return point masses from a ``{value: probability}`` mapping."""

    return point_masses(list(masses.keys()), list(masses.values()))


def expectation(d: BucketedDistribution) -> float:
    """Return ``sum(rep_i * prob_i)``."""

    return float(np.dot(d.reps, d.probs))


def mode(d: BucketedDistribution) -> float:
    """Return the representative of the most probable bucket (first on ties)."""

    return float(d.reps[int(np.argmax(d.probs))])


def collapse_to_mean(d: BucketedDistribution) -> BucketedDistribution:
    """Return the point mass at the expectation of ``d``."""

    return d if d.is_point else point(expectation(d), nonnegative=False)


@dataclass(frozen=True)
class PrefixTables:
    """Cumulative probabilities and conditional means at a set of thresholds.

    ``geq`` is keyed by the distribution's own representatives; every other
    table is keyed by the requested thresholds.  Conditional means over events
    of probability zero are ``None``.
    """

    thresholds: tuple[float, ...]
    geq: Mapping[float, float]
    leq_at: Mapping[float, float]
    lt_at: Mapping[float, float]
    geq_at: Mapping[float, float]
    gt_at: Mapping[float, float]
    cond_mean_leq: Mapping[float, float | None]
    cond_mean_lt: Mapping[float, float | None]
    cond_mean_geq: Mapping[float, float | None]
    cond_mean_gt: Mapping[float, float | None]


def _conditional(weighted: float, mass: float) -> float | None:
    return weighted / mass if mass > 0.0 else None


def prefix_tables(
    d: BucketedDistribution,
    thresholds: Sequence[float],
    *,
    counter: VisitCounter | None = None,
) -> PrefixTables:
    """Compute :class:`PrefixTables` of ``d`` in one ascending and one descending sweep.

    The work is ``O(len(d) + len(thresholds))`` element visits.
    """

    ts = [float(t) for t in thresholds]
    if any(later < earlier for earlier, later in zip(ts, ts[1:])):
        raise DistributionUsageError("thresholds must be sorted ascending")
    reps = d.reps.tolist()
    probs = d.probs.tolist()
    n = len(reps)
    visits = 0

    leq_at: dict[float, float] = {}
    lt_at: dict[float, float] = {}
    cond_leq: dict[float, float | None] = {}
    cond_lt: dict[float, float | None] = {}
    i, mass, weighted = 0, 0.0, 0.0
    for t in ts:
        visits += 1
        while i < n and reps[i] < t:
            mass += probs[i]
            weighted += reps[i] * probs[i]
            i += 1
            visits += 1
        lt_at[t] = mass
        cond_lt[t] = _conditional(weighted, mass)
        if i < n and reps[i] == t:
            leq_at[t] = mass + probs[i]
            cond_leq[t] = _conditional(weighted + reps[i] * probs[i], mass + probs[i])
        else:
            leq_at[t] = mass
            cond_leq[t] = cond_lt[t]

    geq_at: dict[float, float] = {}
    gt_at: dict[float, float] = {}
    cond_geq: dict[float, float | None] = {}
    cond_gt: dict[float, float | None] = {}
    i, mass, weighted = n - 1, 0.0, 0.0
    for t in reversed(ts):
        visits += 1
        while i >= 0 and reps[i] > t:
            mass += probs[i]
            weighted += reps[i] * probs[i]
            i -= 1
            visits += 1
        gt_at[t] = mass
        cond_gt[t] = _conditional(weighted, mass)
        if i >= 0 and reps[i] == t:
            geq_at[t] = mass + probs[i]
            cond_geq[t] = _conditional(weighted + reps[i] * probs[i], mass + probs[i])
        else:
            geq_at[t] = mass
            cond_geq[t] = cond_gt[t]

    geq: dict[float, float] = {}
    tail = 0.0
    for rep, prob in zip(reversed(reps), reversed(probs)):
        tail += prob
        geq[rep] = tail
        visits += 1

    if counter is not None:
        counter.add(visits)
    return PrefixTables(
        thresholds=tuple(ts),
        geq=geq,
        leq_at=leq_at,
        lt_at=lt_at,
        geq_at=geq_at,
        gt_at=gt_at,
        cond_mean_leq=cond_leq,
        cond_mean_lt=cond_lt,
        cond_mean_geq=cond_geq,
        cond_mean_gt=cond_gt,
    )


def product_distribution(
    dA: BucketedDistribution, dB: BucketedDistribution, dSigma: BucketedDistribution
) -> BucketedDistribution:
    """Distribution of ``a * b * sigma`` for independent ``A``, ``B`` and ``sigma``.

    Every triple of representatives yields a point mass; equal values merge.
    The mean equals ``E(A) E(B) E(sigma)``.
    """

    return product_of((dA, dB, dSigma))


def product_of(dists: Sequence[BucketedDistribution]) -> BucketedDistribution:
    """Distribution of the product of independent parameters (exact mode)."""

    if not dists:
        raise DistributionUsageError("product_of needs at least one distribution")
    if len(dists) == 1:
        return dists[0]
    if all(d.is_point for d in dists):
        value = reduce(lambda acc, d: acc * float(d.reps[0]), dists, 1.0)
        return point(value, nonnegative=False)
    values = reduce(np.multiply.outer, [d.reps for d in dists])
    weights = reduce(np.multiply.outer, [d.probs for d in dists])
    return point_masses(values, weights)


def coalesce(d: BucketedDistribution, labels: Sequence[int]) -> BucketedDistribution:
    """Merge runs of adjacent buckets sharing a label into single buckets.

    ``labels`` must be non-decreasing.  A merged bucket spans ``[first lo,
    last hi)``; its representative is the probability-weighted mean of its
    members, which keeps the overall mean unchanged.
    """

    if len(labels) != len(d):
        raise DistributionUsageError("one label per bucket is required")
    if any(b < a for a, b in zip(labels, labels[1:])):
        raise DistributionUsageError("labels must be non-decreasing")
    merged: list[Bucket] = []
    start = 0
    for end in range(1, len(d) + 1):
        if end < len(d) and labels[end] == labels[start]:
            continue
        members = d.buckets[start:end]
        if len(members) == 1:
            merged.append(members[0])
        else:
            mass = sum(b.prob for b in members)
            low_rep, high_rep = members[0].rep, members[-1].rep
            if mass > 0.0:
                rep = sum(b.rep * b.prob for b in members) / mass
            else:
                rep = sum(b.rep for b in members) / len(members)
            rep = min(max(rep, low_rep), high_rep)
            merged.append(Bucket(members[0].lo, members[-1].hi, rep, mass))
        start = end
    return BucketedDistribution(merged)


def rebucket(d: BucketedDistribution, k: int) -> BucketedDistribution:
    """Coalesce ``d`` into at most ``k`` equal-probability groups of adjacent buckets.

    A bucket joins quantile group ``floor(k * c)``, where ``c`` is the
    cumulative probability at the bucket's mid-mass.  Distributions with at
    most ``k`` buckets are returned unchanged.
    """

    if k < 1:
        raise DistributionUsageError("rebucket needs k >= 1")
    if len(d) <= k:
        return d
    before = np.concatenate(([0.0], np.cumsum(d.probs)[:-1]))
    centers = before + d.probs / 2.0
    labels = np.minimum(np.floor(centers * k), k - 1).astype(int)
    return coalesce(d, labels.tolist())


__all__ = [
    "Bucket",
    "BucketedDistribution",
    "DistributionError",
    "DistributionUsageError",
    "NORMALIZE_TOLERANCE",
    "PrefixTables",
    "SUM_TOLERANCE",
    "VisitCounter",
    "coalesce",
    "collapse_to_mean",
    "discrete",
    "expectation",
    "from_public_list",
    "mode",
    "point",
    "point_masses",
    "prefix_tables",
    "product_distribution",
    "product_of",
    "rebucket",
]
