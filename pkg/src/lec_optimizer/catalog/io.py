"""JSON ingestion and serialization of catalogs, queries and environments.

Input files are validated with pydantic schemas first; the resulting payloads
are then turned into the immutable model objects, whose own invariants are
checked on construction.  Every failure surfaces as a
:class:`~lec_optimizer.catalog.model.CatalogValidationError` whose
diagnostics carry ``"<file>:<json path>"`` locations.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, Literal, TypeVar

import pydantic as pyd

from ..core.distributions import (
    Bucket,
    BucketedDistribution,
    DistributionError,
    point,
)
from ..core.markov import TransitionModel
from .model import (
    Catalog,
    CatalogDiagnostic,
    CatalogValidationError,
    Environment,
    Predicate,
    QuerySpec,
    Relation,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


class _Strict(pyd.BaseModel):
    model_config = pyd.ConfigDict(extra="forbid", frozen=True)


class BucketPayload(_Strict):
    """One ``{lo, hi, rep, prob}`` bucket; ``hi`` may be the string ``"inf"``."""

    lo: float
    hi: Literal["inf"] | float
    rep: float
    prob: float


DistributionPayload = float | list[BucketPayload]


class RelationPayload(_Strict):
    name: str
    pages: DistributionPayload


class CatalogPayload(_Strict):
    relations: list[RelationPayload]


class PredicatePayload(_Strict):
    left: str
    right: str
    selectivity: DistributionPayload


class QueryPayload(_Strict):
    relations: list[str]
    predicates: list[PredicatePayload] = pyd.Field(default_factory=list)
    sorted_result: bool = False
    order_owner: str | None = None


class TransitionPayload(_Strict):
    states: list[float]
    matrix: list[list[float]]


class EnvironmentPayload(_Strict):
    memory: DistributionPayload
    transition: TransitionPayload | None = None


def _json_path(loc: Sequence[str | int]) -> str:
    path = "$"
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def _nested(path: str, error: CatalogValidationError) -> CatalogValidationError:
    return CatalogValidationError(
        CatalogDiagnostic(d.code, path + d.location.removeprefix("$"), d.message)
        for d in error.diagnostics
    )


def _build(path: str, factory: Callable[[], T]) -> T:
    """Run ``factory`` and report its failures at ``path``."""

    try:
        return factory()
    except CatalogValidationError as error:
        raise _nested(path, error) from error
    except DistributionError as error:
        raise CatalogValidationError([CatalogDiagnostic("invariant", path, str(error))]) from error


def _distribution(payload: DistributionPayload, path: str, *, nonnegative: bool = True) -> BucketedDistribution:
    if isinstance(payload, list):
        return _build(
            path,
            lambda: BucketedDistribution(
                Bucket(b.lo, float("inf") if b.hi == "inf" else float(b.hi), b.rep, b.prob)
                for b in payload
            ),
        )
    return _build(path, lambda: point(payload, nonnegative=nonnegative))


def _read_payload(path: str | Path, schema: type[pyd.BaseModel]) -> Any:
    source = Path(path)
    if not source.is_file():
        raise CatalogValidationError(
            [CatalogDiagnostic("missing_file", f"{source}:$", "file does not exist")]
        )
    try:
        raw = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise CatalogValidationError(
            [
                CatalogDiagnostic(
                    "parse_error",
                    f"{source}:$",
                    f"invalid JSON at line {error.lineno} column {error.colno}: {error.msg}",
                )
            ]
        ) from error
    try:
        return schema.model_validate(raw)
    except pyd.ValidationError as error:
        raise CatalogValidationError(
            CatalogDiagnostic("parse_error", f"{source}:{_json_path(item['loc'])}", item["msg"])
            for item in error.errors()
        ) from error


def catalog_from_payload(payload: CatalogPayload) -> Catalog:
    """Convert a validated catalog payload into a :class:`Catalog`."""

    relations = []
    for index, item in enumerate(payload.relations):
        path = f"$.relations[{index}]"
        pages = _distribution(item.pages, f"{path}.pages")
        relations.append(_build(path, lambda: Relation(item.name, pages)))
    return Catalog(tuple(relations))


def query_from_payload(payload: QueryPayload) -> QuerySpec:
    """Convert a validated query payload into a :class:`QuerySpec`."""

    predicates = []
    for index, item in enumerate(payload.predicates):
        path = f"$.predicates[{index}]"
        selectivity = _distribution(item.selectivity, f"{path}.selectivity")
        predicates.append(_build(path, lambda: Predicate(item.left, item.right, selectivity)))
    return QuerySpec(
        relations=tuple(payload.relations),
        predicates=tuple(predicates),
        sorted_result_required=payload.sorted_result,
        order_column_owner=payload.order_owner,
    )


def environment_from_payload(payload: EnvironmentPayload) -> Environment:
    """Convert a validated environment payload into an :class:`Environment`."""

    memory = _distribution(payload.memory, "$.memory")
    transition = None
    if payload.transition is not None:
        chain = payload.transition
        transition = _build("$.transition", lambda: TransitionModel(chain.states, chain.matrix))
    return Environment(memory, transition)


def _load(path: str | Path, schema: type[pyd.BaseModel], convert: Callable[[Any], T]) -> T:
    payload = _read_payload(path, schema)
    try:
        loaded = convert(payload)
    except CatalogValidationError as error:
        raise error.with_source(str(path)) from error
    logger.debug("loaded %s from %s", type(loaded).__name__, path)
    return loaded


def load_catalog(path: str | Path) -> Catalog:
    """Load and validate ``catalog.json``."""

    return _load(path, CatalogPayload, catalog_from_payload)


def load_query(path: str | Path) -> QuerySpec:
    """Load and validate ``query.json``."""

    return _load(path, QueryPayload, query_from_payload)


def load_environment(path: str | Path) -> Environment:
    """Load and validate ``env.json``."""

    return _load(path, EnvironmentPayload, environment_from_payload)


def load_problem_files(
    catalog_path: str | Path, query_path: str | Path, env_path: str | Path
) -> tuple[Catalog, QuerySpec, Environment]:
    """Load all three inputs and check the query against the catalog."""

    catalog = load_catalog(catalog_path)
    query = load_query(query_path)
    environment = load_environment(env_path)
    try:
        catalog.check_query(query)
    except CatalogValidationError as error:
        raise error.with_source(str(query_path)) from error
    return catalog, query, environment


def dump_catalog(catalog: Catalog) -> dict[str, Any]:
    """Return the JSON form of ``catalog``."""

    return {
        "relations": [
            {"name": r.name, "pages": r.pages.to_public_list()} for r in catalog.relations
        ]
    }


def dump_query(query: QuerySpec) -> dict[str, Any]:
    """Return the JSON form of ``query``."""

    return {
        "relations": list(query.relations),
        "predicates": [
            {"left": p.left, "right": p.right, "selectivity": p.selectivity.to_public_list()}
            for p in query.predicates
        ],
        "sorted_result": query.sorted_result_required,
        "order_owner": query.order_column_owner,
    }


def dump_environment(environment: Environment) -> dict[str, Any]:
    """Return the JSON form of ``environment``."""

    payload: dict[str, Any] = {"memory": environment.memory.to_public_list()}
    if environment.transition is not None:
        payload["transition"] = environment.transition.to_public_dict()
    return payload


def write_json(path: str | Path, payload: object) -> None:
    """Write ``payload`` as indented, key-sorted JSON."""

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


__all__ = [
    "BucketPayload",
    "CatalogPayload",
    "EnvironmentPayload",
    "PredicatePayload",
    "QueryPayload",
    "RelationPayload",
    "TransitionPayload",
    "catalog_from_payload",
    "dump_catalog",
    "dump_environment",
    "dump_query",
    "environment_from_payload",
    "load_catalog",
    "load_environment",
    "load_problem_files",
    "load_query",
    "query_from_payload",
    "write_json",
]
