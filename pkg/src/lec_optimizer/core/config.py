"""Project-wide optimizer, oracle and simulation configuration."""

from __future__ import annotations

from dataclasses import dataclass

LOG_ENV_VAR = "LEC_LOG"


def _check_budget(name: str, value: int | None) -> None:
    if value is not None and value < 1:
        raise ValueError(f"{name} must be at least one (or None for exact mode)")


@dataclass(frozen=True)
class OptimizerConfig:
    """Configuration parameters for the dynamic-programming optimizers.

    Attributes
    ----------
    rebucket_budget:
        Maximum number of buckets kept for a result-size distribution after each
        product in Algorithm D.  ``None`` keeps every point mass (exact mode).
    selectivity_budget:
        Maximum number of buckets of a combined selectivity distribution.
    cube_root_rebucket:
        Rebucket each product input to ``ceil(cbrt(k))`` buckets before the
        product; the product is still capped at ``k`` buckets.
    top_c:
        Default number of plans retained per subset by Algorithm B.
    auto_buckets:
        Coarsen memory per node and per join method at the formula breakpoints.
    include_mean_candidate:
        Also generate Algorithm A/B candidates at the mean memory value, one
        more than the number of memory buckets when the mean is not a
        representative.
    """

    rebucket_budget: int | None = 16
    selectivity_budget: int | None = 16
    cube_root_rebucket: bool = False
    top_c: int = 3
    auto_buckets: bool = False
    include_mean_candidate: bool = True

    def __post_init__(self) -> None:
        """Validate bucket budgets and the top-c width."""

        _check_budget("rebucket_budget", self.rebucket_budget)
        _check_budget("selectivity_budget", self.selectivity_budget)
        if self.top_c < 1:
            raise ValueError("top_c must be at least one")
        if self.cube_root_rebucket and self.rebucket_budget is None:
            raise ValueError("cube_root_rebucket requires a finite rebucket_budget")


@dataclass(frozen=True)
class OracleLimits:
    """Explicit refusal thresholds for brute-force enumeration."""

    max_relations: int = 7
    max_joint_points: int = 250_000

    def __post_init__(self) -> None:
        """Validate the refusal thresholds."""

        if self.max_relations < 1:
            raise ValueError("max_relations must be at least one")
        if self.max_joint_points < 1:
            raise ValueError("max_joint_points must be at least one")


@dataclass(frozen=True)
class SimulationSettings:
    """Monte Carlo controls; trials are drawn in independently seeded chunks."""

    trials: int = 100_000
    seed: int = 0
    chunk_size: int = 8192
    workers: int = 1

    def __post_init__(self) -> None:
        """Validate the trial count, seed and chunking."""

        if self.trials < 1:
            raise ValueError("trials must be at least one")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be at least one")
        if self.workers < 1:
            raise ValueError("workers must be at least one")
