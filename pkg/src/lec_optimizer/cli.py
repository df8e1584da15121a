"""Command line interface: optimize, oracle, simulate and compare."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, NoReturn, Sequence

from .catalog.io import load_problem_files, write_json
from .catalog.model import Catalog, CatalogValidationError, Environment, QuerySpec
from .core.config import LOG_ENV_VAR, OptimizerConfig, OracleLimits, SimulationSettings
from .core.distributions import expectation, mode
from .optimizer.algorithms import Algorithm, optimize
from .optimizer.plan import Plan, load_plan, render_plan_tree
from .validation.oracle import OracleRefusal, oracle_best
from .validation.simulator import SimReport, compare, simulate

PROG = "lec-opt"
RANKED_TABLE_MAX_RELATIONS = 4
LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}

logger = logging.getLogger(__name__)
_handler: logging.Handler | None = None


class CliUsageError(ValueError):
    """Raised for unknown flags, missing arguments and other argument errors."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise CliUsageError(message)


def main(args: Sequence[str] | None = None) -> int:
    """Parse command-line arguments and run the requested subcommand."""

    configure_logging()
    parser = _build_parser()
    try:
        ns = parser.parse_args(args=args)
    except CliUsageError as error:
        return _report("arguments", str(error), 1)
    try:
        return _COMMANDS[ns.command](ns)
    except OracleRefusal as error:
        return _report(f"{ns.command}:{error.limit}", str(error), 2)
    except CatalogValidationError as error:
        first = error.diagnostics[0]
        return _report(first.location, first.message, 1)
    except ValueError as error:
        return _report(ns.command, str(error), 1)


def configure_logging() -> None:
    """Install one stderr handler at the level named by ``LEC_LOG``."""

    value = os.environ.get(LOG_ENV_VAR, "info").strip().lower()
    level = LOG_LEVELS.get(value)
    global _handler
    package = logging.getLogger("lec_optimizer")
    if _handler is not None:
        package.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package.addHandler(_handler)
    package.setLevel(logging.INFO if level is None else level)
    if level is None:
        logger.warning("unknown %s value %r, using info", LOG_ENV_VAR, value)


def _report(location: str, message: str, code: int) -> int:
    print(f"{PROG}: error: {location}: {message}", file=sys.stderr)
    return code


def _add_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--catalog", required=True, help="Catalog JSON path")
    parser.add_argument("--query", required=True, help="Query JSON path")
    parser.add_argument("--env", required=True, help="Environment JSON path")
    parser.add_argument("--json", action="store_true", help="Emit deterministic JSON")


def _add_trials(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trials", type=int, default=SimulationSettings.trials)
    parser.add_argument("--seed", type=int, default=0, help="Run seed (default 0)")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Least-expected-cost join-order optimizer")
    subparsers = parser.add_subparsers(dest="command", required=True)
    algorithms = [a.value for a in Algorithm]

    opt = subparsers.add_parser("optimize", help="Choose a left-deep plan")
    opt.add_argument("--algo", required=True, choices=algorithms)
    _add_inputs(opt)
    opt.add_argument("--c", type=int, default=None, help="Plans kept per subset by lec-b")
    opt.add_argument("--buckets", type=int, default=16, help="Bucket budget after each product")
    opt.add_argument("--exact", action="store_true", help="Never rebucket (lec-d)")
    opt.add_argument("--cube-root", action="store_true", help="Rebucket product inputs instead")
    opt.add_argument("--auto-buckets", action="store_true", help="Coarsen memory at formula breakpoints")
    point = opt.add_mutually_exclusive_group()
    point.add_argument("--memory", type=float, default=None, help="Fixed memory for lsc")
    point.add_argument("--lsc-point", choices=["mean", "mode"], default="mean")
    opt.add_argument("--out", help="Also write the plan JSON to this path")

    oracle = subparsers.add_parser("oracle", help="Exhaustively find the least-expected-cost plan")
    _add_inputs(oracle)
    oracle.add_argument("--max-relations", type=int, default=OracleLimits.max_relations)
    oracle.add_argument("--max-joint-points", type=int, default=OracleLimits.max_joint_points)
    oracle.add_argument("--collapse", action="store_true", help="Use expected sizes and selectivities")

    sim = subparsers.add_parser("simulate", help="Monte Carlo cost of one plan")
    sim.add_argument("--plan", required=True, help="Plan JSON path")
    _add_inputs(sim)
    _add_trials(sim)

    cmp = subparsers.add_parser("compare", help="Paired Monte Carlo ranking of several plans")
    cmp.add_argument("--plan", action="append", default=[], dest="plans", help="Plan JSON path")
    cmp.add_argument("--algo", action="append", default=[], dest="algos", choices=algorithms)
    _add_inputs(cmp)
    _add_trials(cmp)
    return parser


def _config(ns: argparse.Namespace) -> OptimizerConfig:
    budget = None if ns.exact else ns.buckets
    return OptimizerConfig(
        rebucket_budget=budget,
        selectivity_budget=budget,
        cube_root_rebucket=ns.cube_root,
        top_c=OptimizerConfig.top_c if ns.c is None else ns.c,
        auto_buckets=ns.auto_buckets,
    )


def _fixed_memory(ns: argparse.Namespace, environment: Environment) -> float | None:
    if ns.algo != Algorithm.LSC.value:
        return None
    if ns.memory is not None:
        return ns.memory
    return mode(environment.memory) if ns.lsc_point == "mode" else expectation(environment.memory)


def _print_json(payload: object) -> None:
    print(json.dumps(payload, sort_keys=True))


def _run_optimize(ns: argparse.Namespace) -> int:
    catalog, query, environment = load_problem_files(ns.catalog, ns.query, ns.env)
    fixed = _fixed_memory(ns, environment)
    plan = optimize(ns.algo, catalog, query, environment, config=_config(ns), fixed_memory=fixed, c=ns.c)
    payload: dict[str, Any] = {**plan.to_public_dict(), "algorithm": ns.algo}
    if fixed is not None:
        payload["fixed_memory"] = fixed
    if ns.out:
        write_json(ns.out, payload)
    if ns.json:
        _print_json(payload)
        return 0
    if fixed is not None:
        print(f"{ns.algo} at memory {fixed:,.2f}")
    print(render_plan_tree(plan))
    return 0


def _describe(plan: Plan) -> str:
    joins = " ".join(
        f"{m.value}({plan.order[i + 1]})" for i, m in enumerate(plan.methods)
    )
    text = f"{plan.order[0]} {joins}".strip()
    return f"{text} +Sort" if plan.final_sort else text


def _run_oracle(ns: argparse.Namespace) -> int:
    catalog, query, environment = load_problem_files(ns.catalog, ns.query, ns.env)
    limits = OracleLimits(max_relations=ns.max_relations, max_joint_points=ns.max_joint_points)
    result = oracle_best(
        catalog,
        query,
        environment,
        limits=limits,
        collapse=ns.collapse,
        keep_ranking=len(query.relations) <= RANKED_TABLE_MAX_RELATIONS,
    )
    if ns.json:
        _print_json(result.to_public_dict())
        return 0
    print(f"{result.plan_count} plans over {result.joint_points} joint points")
    print(render_plan_tree(result.best))
    if result.ranked:
        print()
        print(f"{'rank':>4}  {'expected cost':>18}  plan")
        for rank, plan in enumerate(result.ranked, start=1):
            print(f"{rank:>4}  {plan.expected_cost:>18,.2f}  {_describe(plan)}")
    return 0


def _settings(ns: argparse.Namespace) -> SimulationSettings:
    return SimulationSettings(trials=ns.trials, seed=ns.seed)


def _print_report(report: SimReport, labels: Sequence[str] = ()) -> None:
    print(f"trials: {report.trials}  seed: {report.seed}  rng: {report.rng_algorithm}")
    if not report.per_plan:
        print(f"mean cost: {report.mean:,.2f}  std error: {report.std_error:,.2f}")
        return
    print(f"{'rank':>4}  {'mean':>18}  {'std error':>14}  {'vs best':>16}  plan")
    for rank, outcome in enumerate(report.per_plan, start=1):
        print(
            f"{rank:>4}  {outcome.mean:>18,.2f}  {outcome.std_error:>14,.2f}  "
            f"{outcome.diff_mean:>+16,.2f}  {labels[outcome.index]}"
        )


def _run_simulate(ns: argparse.Namespace) -> int:
    catalog, query, environment = load_problem_files(ns.catalog, ns.query, ns.env)
    plan = load_plan(ns.plan)
    report = simulate(plan, catalog, query, environment, _settings(ns))
    if ns.json:
        _print_json(report.to_public_dict())
    else:
        _print_report(report)
    return 0


def _candidates(
    ns: argparse.Namespace, catalog: Catalog, query: QuerySpec, environment: Environment
) -> tuple[list[Plan], list[str]]:
    plans = [load_plan(path) for path in ns.plans]
    labels = list(ns.plans)
    for name in ns.algos:
        plans.append(optimize(name, catalog, query, environment))
        labels.append(name)
    return plans, labels


def _run_compare(ns: argparse.Namespace) -> int:
    if not ns.plans and not ns.algos:
        raise CliUsageError("compare needs at least one --plan or --algo")
    catalog, query, environment = load_problem_files(ns.catalog, ns.query, ns.env)
    plans, labels = _candidates(ns, catalog, query, environment)
    report = compare(plans, catalog, query, environment, _settings(ns))
    if ns.json:
        payload = report.to_public_dict()
        payload["labels"] = [labels[outcome.index] for outcome in report.per_plan]
        _print_json(payload)
    else:
        _print_report(report, labels)
    return 0


_COMMANDS = {
    "optimize": _run_optimize,
    "oracle": _run_oracle,
    "simulate": _run_simulate,
    "compare": _run_compare,
}


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
