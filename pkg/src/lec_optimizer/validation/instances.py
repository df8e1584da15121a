"""Seeded random query instances for property suites."""

from __future__ import annotations

import numpy as np

from ..catalog.model import Catalog, Environment, Predicate, QuerySpec, Relation
from ..core.distributions import BucketedDistribution, point_masses
from ..core.markov import TransitionModel

PAGE_RANGE = (1_000, 1_000_000)
MEMORY_RANGE = (16, 4_000)


def _distinct_integers(rng: np.random.Generator, low: int, high: int, count: int) -> np.ndarray:
    values = np.unique(rng.integers(low, high, size=count))
    while values.size < count:
        values = np.unique(np.concatenate((values, rng.integers(low, high, size=count - values.size))))
    return values


def _random_distribution(rng: np.random.Generator, values: np.ndarray) -> BucketedDistribution:
    return point_masses(values, rng.dirichlet(np.ones(values.size)))


def random_instance(
    seed: int,
    n: int,
    memory_buckets: int,
    size_buckets: int = 1,
    selectivity_buckets: int = 1,
    dynamic: bool = False,
) -> tuple[Catalog, QuerySpec, Environment]:
    """Return a reproducible ``(catalog, query, environment)`` triple.

    Relations ``R0 .. R{n-1}`` have integer page counts; predicates form a
    random spanning tree, sometimes with one extra edge, with selectivities
    scaled so join results stay comparable to the inputs.  Memory has
    ``memory_buckets`` integer representatives and, when ``dynamic``, a dense
    random transition matrix over them.
    """

    if n < 1 or memory_buckets < 1 or size_buckets < 1 or selectivity_buckets < 1:
        raise ValueError("relation and bucket counts must be at least one")
    rng = np.random.default_rng(seed)
    names = tuple(f"R{i}" for i in range(n))
    relations = tuple(
        Relation(name, _random_distribution(rng, _distinct_integers(rng, *PAGE_RANGE, size_buckets)))
        for name in names
    )
    means = {relation.name: relation.pages.mean for relation in relations}

    edges = [(names[int(rng.integers(0, i))], names[i]) for i in range(1, n)]
    if n >= 3 and rng.random() < 0.3:
        a, b = sorted(rng.choice(n, size=2, replace=False).tolist())
        if (names[a], names[b]) not in edges:
            edges.append((names[a], names[b]))
    predicates = []
    for left, right in edges:
        scale = 1.0 / max(means[left], means[right])
        factors = np.unique(rng.uniform(0.05, 2.0, size=selectivity_buckets))
        sigma = np.minimum(factors * scale, 1.0)
        predicates.append(Predicate(left, right, _random_distribution(rng, sigma)))

    sorted_result = bool(rng.random() < 0.5)
    owner = str(names[int(rng.integers(0, n))]) if sorted_result and rng.random() < 0.5 else None
    query = QuerySpec(
        relations=names,
        predicates=tuple(predicates),
        sorted_result_required=sorted_result,
        order_column_owner=owner,
    )

    memory = _random_distribution(rng, _distinct_integers(rng, *MEMORY_RANGE, memory_buckets))
    transition = None
    if dynamic:
        matrix = rng.dirichlet(np.ones(len(memory)), size=len(memory))
        transition = TransitionModel(memory.reps.tolist(), matrix)
    return Catalog(relations), query, Environment(memory, transition)


__all__ = ["MEMORY_RANGE", "PAGE_RANGE", "random_instance"]
