"""Left-deep plans, their JSON form and a text rendering."""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import pydantic as pyd

from ..costs.formulas import JoinMethod


class PlanError(ValueError):
    """Raised for malformed plans."""


@dataclass(frozen=True)
class Plan:
    """A left-deep join tree ``((r0 ⋈ r1) ⋈ r2) ...`` with one method per join.

    ``per_phase_costs`` lists one expected cost per join followed by the final
    sort when there is one; a single-relation plan has one scan phase instead
    of joins.  ``expected_cost`` is their sum.
    """

    order: tuple[str, ...]
    methods: tuple[JoinMethod, ...]
    final_sort: bool = False
    expected_cost: float | None = None
    per_phase_costs: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        """Check the method count and that no relation repeats."""

        if not self.order:
            raise PlanError("a plan needs at least one relation")
        if len(self.methods) != len(self.order) - 1:
            raise PlanError(
                f"{len(self.order)} relations need {len(self.order) - 1} join methods, got {len(self.methods)}"
            )
        if len(set(self.order)) != len(self.order):
            raise PlanError(f"relation repeated in join order {self.order}")

    @property
    def structure(self) -> tuple[tuple[str, ...], tuple[JoinMethod, ...]]:
        """Cost-free identity of the plan; equal structures cost the same."""

        return self.order, self.methods

    @property
    def tie_key(self) -> tuple[tuple[str, ...], tuple[int, ...]]:
        """Deterministic tie-break: join order, then method ranks."""

        return self.order, tuple(m.rank for m in self.methods)

    @property
    def sort_key(self) -> tuple[float, tuple[tuple[str, ...], tuple[int, ...]]]:
        """Ordering by expected cost, ties broken by :attr:`tie_key`."""

        if self.expected_cost is None:
            raise PlanError("plan has not been costed")
        return self.expected_cost, self.tie_key

    def with_costs(self, per_phase_costs: Sequence[float]) -> Plan:
        """Return a copy annotated with phase costs and their sum."""

        total = 0.0
        for cost in per_phase_costs:
            total += cost
        return replace(self, expected_cost=total, per_phase_costs=tuple(per_phase_costs))

    def to_public_dict(self) -> dict[str, Any]:
        """Return the JSON-safe plan payload."""

        return {
            "order": list(self.order),
            "methods": [m.value for m in self.methods],
            "final_sort": self.final_sort,
            "expected_cost": self.expected_cost,
            "per_phase_costs": list(self.per_phase_costs),
        }

    @classmethod
    def from_public_dict(cls, payload: Mapping[str, Any]) -> Plan:
        """Build a plan from its JSON payload."""

        try:
            parsed = PlanPayload.model_validate(payload)
        except pyd.ValidationError as error:
            raise PlanError(f"invalid plan payload: {error.errors()[0]['msg']}") from error
        return parsed.to_plan()


class PlanPayload(pyd.BaseModel):
    """Schema of a plan file; costs are optional on input.

    ``algorithm`` and ``fixed_memory`` are written by the command line and
    ignored on input.
    """

    model_config = pyd.ConfigDict(extra="forbid", frozen=True)

    order: list[str]
    methods: list[JoinMethod]
    final_sort: bool = False
    expected_cost: float | None = None
    per_phase_costs: list[float] = pyd.Field(default_factory=list)
    algorithm: str | None = None
    fixed_memory: float | None = None

    def to_plan(self) -> Plan:
        """Convert to a :class:`Plan`."""

        return Plan(
            order=tuple(self.order),
            methods=tuple(self.methods),
            final_sort=self.final_sort,
            expected_cost=self.expected_cost,
            per_phase_costs=tuple(self.per_phase_costs),
        )


def load_plan(path: str | Path) -> Plan:
    """Load a plan JSON file."""

    source = Path(path)
    if not source.is_file():
        raise PlanError(f"{source}: plan file does not exist")
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise PlanError(f"{source}: invalid JSON at line {error.lineno}: {error.msg}") from error
    try:
        return Plan.from_public_dict(payload)
    except PlanError as error:
        raise PlanError(f"{source}: {error}") from error


def _phase_label(plan: Plan, index: int) -> str:
    if index < len(plan.per_phase_costs) and plan.methods:
        return f"  cost {plan.per_phase_costs[index]:,.2f}"
    return ""


def _subtree(plan: Plan, size: int, depth: int) -> list[str]:
    pad = "  " * depth
    if size == 1:
        return [f"{pad}Scan {plan.order[0]}"]
    join = size - 2
    head = f"{pad}{plan.methods[join].value} join [phase {join + 1}]{_phase_label(plan, join)}"
    return [head, *_subtree(plan, size - 1, depth + 1), f"{pad}  Scan {plan.order[size - 1]}"]


def render_plan_tree(plan: Plan) -> str:
    """Return an indented tree, root first, followed by the expected cost."""

    lines: list[str] = []
    depth = 0
    if plan.final_sort:
        joins = len(plan.methods)
        lines.append(f"Sort [phase {joins + 1}]{_phase_label(plan, joins)}")
        depth = 1
    lines.extend(_subtree(plan, len(plan.order), depth))
    if plan.expected_cost is not None:
        lines.append(f"expected cost: {plan.expected_cost:,.2f}")
    return "\n".join(lines)


__all__ = ["Plan", "PlanError", "PlanPayload", "load_plan", "render_plan_tree"]
