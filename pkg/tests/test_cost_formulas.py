"""Deterministic join and sort cost formulas."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lec_optimizer.costs.formulas import (
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

_sizes = st.floats(min_value=1.0, max_value=1e7, allow_nan=False, allow_infinity=False)
_memory = st.floats(min_value=1.0, max_value=1e5, allow_nan=False, allow_infinity=False)


def test_methods_are_declared_in_tie_break_order() -> None:
    assert [m.rank for m in JoinMethod] == [0, 1, 2]
    assert JoinMethod.SORT_MERGE.emits_sorted
    assert not JoinMethod.GRACE_HASH.emits_sorted
    assert JoinMethod("PageNestedLoop") is JoinMethod.PAGE_NESTED_LOOP


@pytest.mark.parametrize(
    ("m", "expected"),
    [(2000.0, 2.8e6), (1000.0, 5.6e6), (700.0, 5.6e6), (101.0, 5.6e6), (50.0, 8.4e6)],
)
def test_sort_merge_passes_follow_the_larger_input(m: float, expected: float) -> None:
    assert cost_sort_merge(1e6, 4e5, m) == pytest.approx(expected)


def test_grace_hash_passes_follow_the_smaller_input() -> None:
    assert cost_grace_hash(1e6, 4e5, 700.0) == pytest.approx(2.8e6)
    assert cost_grace_hash(1e6, 4e5, 600.0) == pytest.approx(5.6e6)
    assert cost_grace_hash(1e6, 4e5, 70.0) == pytest.approx(8.4e6)


def test_nested_loop_fits_when_the_smaller_input_and_two_pages_fit() -> None:
    assert cost_nested_loop(10.0, 100.0, 12.0) == 110.0
    assert cost_nested_loop(10.0, 100.0, 11.0) == 1010.0
    assert cost_nested_loop(100.0, 10.0, 11.0) == 100.0 + 100.0 * 10.0


@pytest.mark.parametrize(
    ("r", "m", "expected"),
    [(0.0, 10.0, 0.0), (3000.0, 3000.0, 6000.0), (3000.0, 2000.0, 12000.0), (3000.0, 50.0, 18000.0)],
)
def test_external_sort(r: float, m: float, expected: float) -> None:
    assert cost_external_sort(r, m) == pytest.approx(expected)


def test_domain_errors() -> None:
    with pytest.raises(CostDomainError):
        cost_sort_merge(1.0, 1.0, 0.0)
    with pytest.raises(CostDomainError):
        cost_grace_hash(-1.0, 1.0, 10.0)
    with pytest.raises(CostDomainError):
        cost_external_sort(-1.0, 10.0)
    with pytest.raises(CostDomainError):
        cost_nested_loop(1.0, float("nan"), 10.0)


def test_vectorized_formulas_broadcast() -> None:
    memory = np.array([50.0, 700.0, 2000.0])

    costs = join_cost(JoinMethod.SORT_MERGE, 1e6, 4e5, memory)

    assert costs.tolist() == pytest.approx([8.4e6, 5.6e6, 2.8e6])


@given(a=_sizes, b=_sizes, m1=_memory, m2=_memory)
def test_more_memory_never_costs_more(a: float, b: float, m1: float, m2: float) -> None:
    low, high = sorted((m1, m2))
    for method, formula in FORMULAS.items():
        assert float(formula(a, b, high)) <= float(formula(a, b, low)), method


@given(a1=_sizes, a2=_sizes, b=_sizes, m=_memory)
def test_larger_inputs_never_cost_less(a1: float, a2: float, b: float, m: float) -> None:
    small, large = sorted((a1, a2))
    for method, formula in FORMULAS.items():
        assert float(formula(small, b, m)) <= float(formula(large, b, m)), method
        assert float(formula(b, small, m)) <= float(formula(b, large, m)), method
    assert float(external_sort_cost(small, m)) <= float(external_sort_cost(large, m))


@given(a=_sizes, b=_sizes, m=_memory)
def test_symmetric_methods_ignore_operand_roles(a: float, b: float, m: float) -> None:
    assert cost_sort_merge(a, b, m) == cost_sort_merge(b, a, m)
    assert cost_grace_hash(a, b, m) == cost_grace_hash(b, a, m)
