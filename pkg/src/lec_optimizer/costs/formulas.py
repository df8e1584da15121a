"""Deterministic page-I/O cost formulas for joins and the final sort.

Each formula has a vectorized form over numpy arrays, used by the expected
cost evaluators, the oracle and the simulator, and a validating scalar
wrapper.  Both forms share the same square and cube roots (``np.sqrt`` and
``np.cbrt``), so a branch decision made by one is made identically by the
other.

Only I/O is charged; there is no CPU term.
"""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike


class CostDomainError(ValueError):
    """Raised when a size or memory argument is outside the formula's domain."""


class JoinMethod(str, Enum):
    """Available join methods, declared in tie-break order."""

    SORT_MERGE = "SortMerge"
    GRACE_HASH = "GraceHash"
    PAGE_NESTED_LOOP = "PageNestedLoop"

    @property
    def emits_sorted(self) -> bool:
        """Whether the join emits its output ordered on the join column."""

        return self is JoinMethod.SORT_MERGE

    @property
    def rank(self) -> int:
        """Position in the deterministic tie-break order."""

        return _RANK[self]


_RANK = {method: index for index, method in enumerate(JoinMethod)}

CostFormula = Callable[[ArrayLike, ArrayLike, ArrayLike], np.ndarray]


def _three_pass_factor(key: np.ndarray, m: np.ndarray) -> np.ndarray:
    """2, 4 or 6 passes as ``m`` falls above ``sqrt(key)``, above ``cbrt(key)``, or below."""

    return np.where(m > np.sqrt(key), 2.0, np.where(m > np.cbrt(key), 4.0, 6.0))


def sort_merge_cost(a: ArrayLike, b: ArrayLike, m: ArrayLike) -> np.ndarray:
    """Sort-merge join cost, keyed to the larger input ``L = max(a, b)``."""

    a, b, m = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, m)))
    return _three_pass_factor(np.maximum(a, b), m) * (a + b)


def grace_hash_cost(a: ArrayLike, b: ArrayLike, m: ArrayLike) -> np.ndarray:
    """Grace hash join cost, keyed to the smaller input ``S = min(a, b)``."""

    a, b, m = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, m)))
    return _three_pass_factor(np.minimum(a, b), m) * (a + b)


def nested_loop_cost(a: ArrayLike, b: ArrayLike, m: ArrayLike) -> np.ndarray:
    """Page nested-loop cost with outer ``a``: one pass if the smaller input fits."""

    a, b, m = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, m)))
    return np.where(m >= np.minimum(a, b) + 2.0, a + b, a + a * b)


def external_sort_cost(r: ArrayLike, m: ArrayLike) -> np.ndarray:
    """External sort of ``r`` pages: 2, 4 or 6 passes; an empty input is free."""

    r, m = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(m, dtype=float))
    passes = np.where(m >= r, 2.0, np.where(m > np.sqrt(r), 4.0, 6.0))
    return np.where(r == 0.0, 0.0, passes * r)


FORMULAS: dict[JoinMethod, CostFormula] = {
    JoinMethod.SORT_MERGE: sort_merge_cost,
    JoinMethod.GRACE_HASH: grace_hash_cost,
    JoinMethod.PAGE_NESTED_LOOP: nested_loop_cost,
}


def join_cost(method: JoinMethod, a: ArrayLike, b: ArrayLike, m: ArrayLike) -> np.ndarray:
    """Vectorized cost of joining outer ``a`` with inner ``b`` under memory ``m``."""

    return FORMULAS[method](a, b, m)


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not np.isfinite(value) or value <= 0.0:
            raise CostDomainError(f"{name} must be finite and positive, got {value!r}")


def cost_sort_merge(a: float, b: float, m: float) -> float:
    """Return ``2(a+b)`` if ``m > sqrt(L)``, ``4(a+b)`` if ``cbrt(L) < m <= sqrt(L)``, else ``6(a+b)``."""

    _check_positive(a=a, b=b, m=m)
    return float(sort_merge_cost(a, b, m))


def cost_grace_hash(a: float, b: float, m: float) -> float:
    """Sort-merge's three cases keyed to ``S = min(a, b)`` instead of the larger input."""

    _check_positive(a=a, b=b, m=m)
    return float(grace_hash_cost(a, b, m))


def cost_nested_loop(a: float, b: float, m: float) -> float:
    """Return ``a + b`` if ``m >= min(a, b) + 2``, else ``a + a*b``."""

    _check_positive(a=a, b=b, m=m)
    return float(nested_loop_cost(a, b, m))


def cost_external_sort(r: float, m: float) -> float:
    """Return ``0`` for ``r = 0``, ``2r`` if ``m >= r``, ``4r`` if ``sqrt(r) < m < r``, else ``6r``."""

    if not np.isfinite(r) or r < 0.0:
        raise CostDomainError(f"r must be finite and non-negative, got {r!r}")
    _check_positive(m=m)
    return float(external_sort_cost(r, m))


__all__ = [
    "CostDomainError",
    "CostFormula",
    "FORMULAS",
    "JoinMethod",
    "cost_external_sort",
    "cost_grace_hash",
    "cost_nested_loop",
    "cost_sort_merge",
    "external_sort_cost",
    "grace_hash_cost",
    "join_cost",
    "nested_loop_cost",
    "sort_merge_cost",
]
