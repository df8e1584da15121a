"""Relations, join predicates, queries and run-time environments."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import Enum

from ..core.distributions import (
    BucketedDistribution,
    DistributionError,
    point,
    product_of,
    rebucket,
)
from ..core.markov import TransitionModel


@dataclass(frozen=True)
class CatalogDiagnostic:
    """One validation finding; ``location`` is ``"<file>:<json path>"``."""

    code: str
    location: str
    message: str

    def render(self) -> str:
        """Return the one-line ``location: message`` form."""

        return f"{self.location}: {self.message}"


class CatalogValidationError(ValueError):
    """Raised when catalog, query or environment input is invalid."""

    def __init__(self, diagnostics: Iterable[CatalogDiagnostic]) -> None:
        """Store diagnostics and render them as one message."""

        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))

    def with_source(self, source: str) -> CatalogValidationError:
        """Return a copy whose locations are prefixed with ``source``."""

        return CatalogValidationError(
            replace(d, location=f"{source}:{d.location}") for d in self.diagnostics
        )


def _fail(code: str, location: str, message: str) -> CatalogValidationError:
    return CatalogValidationError([CatalogDiagnostic(code, location, message)])


class EnvironmentMode(str, Enum):
    """How memory evolves across the phases of a plan."""

    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class Relation:
    """A base relation whose size in pages may be uncertain."""

    name: str
    pages: BucketedDistribution

    def __post_init__(self) -> None:
        """Require a non-empty name and strictly positive page counts."""

        if not self.name:
            raise _fail("invariant", "$.name", "relation name must be non-empty")
        if float(self.pages.reps.min()) <= 0.0:
            raise _fail("invariant", "$.pages", f"relation {self.name!r} needs positive page counts")


@dataclass(frozen=True)
class Predicate:
    """A join predicate between two relations with an uncertain selectivity."""

    left: str
    right: str
    selectivity: BucketedDistribution

    def __post_init__(self) -> None:
        """Require distinct endpoints and selectivities inside ``[0, 1]``."""

        if self.left == self.right:
            raise _fail("invariant", "$", f"predicate joins {self.left!r} with itself")
        reps = self.selectivity.reps
        if float(reps.min()) < 0.0 or float(reps.max()) > 1.0:
            raise _fail("invariant", "$.selectivity", "selectivity representatives must lie in [0, 1]")

    def touches(self, name: str) -> bool:
        """Whether ``name`` is one of the predicate's endpoints."""

        return name in (self.left, self.right)

    def other(self, name: str) -> str:
        """Return the endpoint opposite ``name``."""

        return self.right if name == self.left else self.left


@dataclass(frozen=True)
class Catalog:
    """Named relations available to queries."""

    relations: tuple[Relation, ...]

    def __post_init__(self) -> None:
        """Reject duplicate relation names."""

        seen: set[str] = set()
        for index, relation in enumerate(self.relations):
            if relation.name in seen:
                raise _fail(
                    "duplicate_relation",
                    f"$.relations[{index}].name",
                    f"relation {relation.name!r} declared twice",
                )
            seen.add(relation.name)

    def __contains__(self, name: object) -> bool:
        return any(r.name == name for r in self.relations)

    def relation(self, name: str) -> Relation:
        """Return the relation called ``name``."""

        for relation in self.relations:
            if relation.name == name:
                return relation
        raise _fail("unknown_relation", "$.relations", f"relation {name!r} is not in the catalog")

    def check_query(self, query: QuerySpec) -> None:
        """Raise unless every relation named by ``query`` is declared here."""

        missing = [
            CatalogDiagnostic(
                "unknown_relation",
                f"$.relations[{index}]",
                f"relation {name!r} is not in the catalog",
            )
            for index, name in enumerate(query.relations)
            if name not in self
        ]
        if missing:
            raise CatalogValidationError(missing)


@dataclass(frozen=True)
class QuerySpec:
    """A join query over catalog relations.

    When ``sorted_result_required`` holds, the result must come out ordered
    on the join column carried by ``order_column_owner`` (any join column when
    no owner is named).
    """

    relations: tuple[str, ...]
    predicates: tuple[Predicate, ...] = ()
    sorted_result_required: bool = False
    order_column_owner: str | None = None

    def __post_init__(self) -> None:
        """Check relation references and the ordering owner."""

        if not self.relations:
            raise _fail("invariant", "$.relations", "a query needs at least one relation")
        diagnostics: list[CatalogDiagnostic] = []
        names = set()
        for index, name in enumerate(self.relations):
            if name in names:
                diagnostics.append(
                    CatalogDiagnostic("duplicate_relation", f"$.relations[{index}]", f"relation {name!r} listed twice")
                )
            names.add(name)
        for index, predicate in enumerate(self.predicates):
            for side in ("left", "right"):
                endpoint = getattr(predicate, side)
                if endpoint not in names:
                    diagnostics.append(
                        CatalogDiagnostic(
                            "unknown_relation",
                            f"$.predicates[{index}].{side}",
                            f"predicate references undeclared relation {endpoint!r}",
                        )
                    )
        if self.order_column_owner is not None and self.order_column_owner not in names:
            diagnostics.append(
                CatalogDiagnostic(
                    "unknown_relation",
                    "$.order_owner",
                    f"order owner {self.order_column_owner!r} is not a query relation",
                )
            )
        if diagnostics:
            raise CatalogValidationError(diagnostics)

    def predicates_between(self, j: str, others: Iterable[str]) -> tuple[Predicate, ...]:
        """Return the predicates joining ``j`` to any relation of ``others``, in declaration order."""

        members = frozenset(others)
        return tuple(p for p in self.predicates if p.touches(j) and p.other(j) in members)

    def connected(self, a: str, b: str) -> bool:
        """Whether some predicate joins ``a`` and ``b``."""

        return bool(self.predicates_between(a, (b,)))


@dataclass(frozen=True)
class Environment:
    """Available memory at run time, optionally drifting between phases."""

    memory: BucketedDistribution
    transition: TransitionModel | None = field(default=None)

    def __post_init__(self) -> None:
        """Require positive memory and a transition aligned with the memory buckets."""

        if float(self.memory.reps.min()) <= 0.0:
            raise _fail("invariant", "$.memory", "memory representatives must be positive")
        if self.transition is not None and tuple(self.memory.reps.tolist()) != self.transition.states:
            raise _fail(
                "invariant",
                "$.transition.states",
                "transition states must equal the memory representatives",
            )

    @property
    def mode(self) -> EnvironmentMode:
        """Static without a transition model, dynamic with one."""

        return EnvironmentMode.STATIC if self.transition is None else EnvironmentMode.DYNAMIC

    @property
    def is_dynamic(self) -> bool:
        """Whether memory drifts between phases."""

        return self.mode is EnvironmentMode.DYNAMIC

    def as_static(self) -> Environment:
        """Return this environment with the transition model dropped."""

        return Environment(self.memory) if self.transition is not None else self


def selectivity_between(
    q: QuerySpec, j: str, S: Iterable[str], *, budget: int | None = 16
) -> BucketedDistribution:
    """Combined selectivity of every predicate joining ``j`` to a member of ``S``.

    Independent predicates multiply; no predicate means the trivially true
    predicate, selectivity one.  The product is rebucketed to ``budget``
    buckets unless ``budget`` is ``None``.
    """

    members = tuple(S)
    if j in members:
        raise DistributionError(f"relation {j!r} is already part of the joined set")
    predicates = q.predicates_between(j, members)
    if not predicates:
        return point(1.0)
    combined = product_of([p.selectivity for p in predicates])
    return combined if budget is None else rebucket(combined, budget)


__all__ = [
    "Catalog",
    "CatalogDiagnostic",
    "CatalogValidationError",
    "Environment",
    "EnvironmentMode",
    "Predicate",
    "QuerySpec",
    "Relation",
    "selectivity_between",
]
