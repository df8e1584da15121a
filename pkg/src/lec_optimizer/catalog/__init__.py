"""Query inputs: relations, predicates, environments and their JSON files."""

from .io import (
    dump_catalog,
    dump_environment,
    dump_query,
    load_catalog,
    load_environment,
    load_problem_files,
    load_query,
    write_json,
)
from .model import (
    Catalog,
    CatalogDiagnostic,
    CatalogValidationError,
    Environment,
    EnvironmentMode,
    Predicate,
    QuerySpec,
    Relation,
    selectivity_between,
)

__all__ = [
    "Catalog",
    "CatalogDiagnostic",
    "CatalogValidationError",
    "Environment",
    "EnvironmentMode",
    "Predicate",
    "QuerySpec",
    "Relation",
    "dump_catalog",
    "dump_environment",
    "dump_query",
    "load_catalog",
    "load_environment",
    "load_problem_files",
    "load_query",
    "selectivity_between",
    "write_json",
]
