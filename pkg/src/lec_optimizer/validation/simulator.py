"""Monte Carlo check of analytic expected costs.

Each trial draws a page count per relation, a selectivity per predicate and
a memory value per phase (one value under static memory, a Markov trajectory
under drifting memory), always picking bucket representatives so the
simulation targets the same bucketed model the optimizers see.  Trials run
in chunks, each with its own generator spawned from the run seed, so a
report depends only on the seed and the chunk size.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..catalog.model import Catalog, Environment, QuerySpec
from ..core.config import SimulationSettings
from ..core.distributions import BucketedDistribution
from ..optimizer.plan import Plan
from ..optimizer.problem import OptimizerUsageError, Problem
from .oracle import JointSpace, memory_slots, realized_costs

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Philox/SeedSequence.spawn"


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Counter-based generator for ``seed``."""

    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(sequence))


def _draw_indices(rng: np.random.Generator, probs: np.ndarray, size: int) -> np.ndarray:
    """Inverse-CDF draw of bucket indices; zero-mass buckets are never drawn."""

    cumulative = np.cumsum(probs)
    indices = np.searchsorted(cumulative, rng.random(size) * cumulative[-1], side="right")
    return np.minimum(indices, len(probs) - 1)


def _draw(rng: np.random.Generator, d: BucketedDistribution, size: int) -> np.ndarray:
    return d.reps[_draw_indices(rng, d.probs, size)]


def _draw_memory(rng: np.random.Generator, environment: Environment, phases: int, size: int) -> np.ndarray:
    """``(size, phases)`` memory values; rows are trajectories."""

    memory = environment.memory
    state = _draw_indices(rng, memory.probs, size)
    if environment.transition is None:
        return np.repeat(memory.reps[state][:, None], phases, axis=1)
    matrix = environment.transition.matrix
    cumulative = np.cumsum(matrix, axis=1)
    path = np.empty((size, phases), dtype=int)
    path[:, 0] = state
    for t in range(1, phases):
        rows = cumulative[path[:, t - 1]]
        u = rng.random(size)[:, None] * rows[:, -1:]
        path[:, t] = np.minimum((rows <= u).sum(axis=1), len(memory) - 1)
    return memory.reps[path]


def sample_trajectories(
    environment: Environment, phases: int, trials: int, seed: int = 0
) -> np.ndarray:
    """Draw ``trials`` memory trajectories of ``phases`` values each.

    Static memory yields constant trajectories.
    """

    if phases < 1 or trials < 1:
        raise OptimizerUsageError("phases and trials must be at least one")
    return _draw_memory(make_rng(seed), environment, phases, trials)


def sample_trajectory(environment: Environment, phases: int, seed: int = 0) -> list[float]:
    """One memory trajectory: an initial draw, then one transition per phase."""

    return sample_trajectories(environment, phases, 1, seed)[0].tolist()


def _sample_space(
    rng: np.random.Generator,
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    size: int,
) -> JointSpace:
    pages = {name: _draw(rng, catalog.relation(name).pages, size) for name in sorted(query.relations)}
    selectivities = tuple(_draw(rng, p.selectivity, size) for p in query.predicates)
    slots = memory_slots(query)
    memory = _draw_memory(rng, environment, slots, size)
    return JointSpace(
        pages=pages,
        selectivities=selectivities,
        memory=tuple(memory[:, t] for t in range(slots)),
        probs=np.full(size, 1.0 / size),
    )


@dataclass(frozen=True)
class PlanOutcome:
    """Realized cost statistics of one plan, paired against the leader.

    ``index`` is the plan's position in the compared input.
    """

    plan: Plan
    index: int
    mean: float
    std_error: float
    diff_mean: float
    diff_std_error: float

    def to_public_dict(self) -> dict[str, object]:
        """Return the JSON-safe outcome."""

        return {
            "plan": self.plan.to_public_dict(),
            "index": self.index,
            "mean": self.mean,
            "std_error": self.std_error,
            "diff_mean": self.diff_mean,
            "diff_std_error": self.diff_std_error,
        }


@dataclass(frozen=True)
class SimReport:
    """Monte Carlo summary; ``per_plan`` is ranked by realized mean when comparing."""

    trials: int
    mean: float
    std_error: float
    seed: int
    rng_algorithm: str = RNG_ALGORITHM
    per_plan: tuple[PlanOutcome, ...] = ()

    def to_public_dict(self) -> dict[str, object]:
        """Return the JSON-safe report."""

        return {
            "trials": self.trials,
            "mean": self.mean,
            "std_error": self.std_error,
            "seed": self.seed,
            "rng_algorithm": self.rng_algorithm,
            "per_plan": [outcome.to_public_dict() for outcome in self.per_plan],
        }


def summarize(costs: np.ndarray) -> tuple[float, float]:
    """Sample mean and standard error; a constant sample has standard error zero."""

    if costs.size == 0:
        raise OptimizerUsageError("no trials to summarize")
    if np.all(costs == costs[0]):
        return float(costs[0]), 0.0
    std_error = float(np.std(costs, ddof=1) / np.sqrt(costs.size))
    return float(np.mean(costs)), std_error


def _realize(
    plans: Sequence[Plan],
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    settings: SimulationSettings,
) -> np.ndarray:
    """``(len(plans), trials)`` realized costs under common random numbers."""

    problem = Problem(catalog, query)
    for plan in plans:
        problem.check_plan(plan)
    chunks = -(-settings.trials // settings.chunk_size)
    seeds = np.random.SeedSequence(settings.seed).spawn(chunks)
    sizes = [min(settings.chunk_size, settings.trials - i * settings.chunk_size) for i in range(chunks)]

    def run(index: int) -> np.ndarray:
        space = _sample_space(make_rng(seeds[index]), catalog, query, environment, sizes[index])
        return np.stack([realized_costs(plan, space, query) for plan in plans])

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            parts = list(pool.map(run, range(chunks)))
    else:
        parts = [run(index) for index in range(chunks)]
    logger.info(
        "simulated %d trials of %d plan(s) in %d chunks (%s)",
        settings.trials,
        len(plans),
        chunks,
        RNG_ALGORITHM,
    )
    return np.concatenate(parts, axis=1)


def simulate(
    plan: Plan,
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    settings: SimulationSettings | None = None,
) -> SimReport:
    """Realized mean cost of ``plan`` and its standard error."""

    settings = settings or SimulationSettings()
    costs = _realize([plan], catalog, query, environment, settings)[0]
    mean, std_error = summarize(costs)
    return SimReport(trials=settings.trials, mean=mean, std_error=std_error, seed=settings.seed)


def compare(
    plans: Sequence[Plan],
    catalog: Catalog,
    query: QuerySpec,
    environment: Environment,
    settings: SimulationSettings | None = None,
) -> SimReport:
    """Rank ``plans`` by realized mean on shared samples.

    Each outcome carries the paired difference to the top-ranked plan; the
    report's own mean and standard error are the leader's.
    """

    if not plans:
        raise OptimizerUsageError("compare needs at least one plan")
    settings = settings or SimulationSettings()
    costs = _realize(plans, catalog, query, environment, settings)
    stats = [summarize(row) for row in costs]
    order = sorted(range(len(plans)), key=lambda i: (stats[i][0], plans[i].tie_key))
    leader = costs[order[0]]
    outcomes = []
    for i in order:
        diff_mean, diff_error = summarize(costs[i] - leader)
        outcomes.append(PlanOutcome(plans[i], i, stats[i][0], stats[i][1], diff_mean, diff_error))
    return SimReport(
        trials=settings.trials,
        mean=outcomes[0].mean,
        std_error=outcomes[0].std_error,
        seed=settings.seed,
        per_plan=tuple(outcomes),
    )


__all__ = [
    "PlanOutcome",
    "RNG_ALGORITHM",
    "SimReport",
    "compare",
    "make_rng",
    "sample_trajectories",
    "sample_trajectory",
    "simulate",
    "summarize",
]
