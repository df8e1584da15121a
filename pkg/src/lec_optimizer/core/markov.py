"""Time-homogeneous Markov model of memory drift between execution phases."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import null_space

from .distributions import (
    NORMALIZE_TOLERANCE,
    SUM_TOLERANCE,
    Bucket,
    BucketedDistribution,
    DistributionError,
    DistributionUsageError,
)


@dataclass(frozen=True)
class TransitionModel:
    """Row-stochastic transition matrix over memory bucket representatives.

    ``matrix[i, j]`` is the probability of moving from ``states[i]`` to
    ``states[j]`` between two consecutive phases.
    """

    states: tuple[float, ...]
    matrix: np.ndarray = field(compare=False)

    def __init__(self, states: Sequence[float], matrix: Sequence[Sequence[float]] | np.ndarray) -> None:
        """Validate the state grid and the stochastic matrix."""

        grid = tuple(float(s) for s in states)
        values = np.array(matrix, dtype=float)
        if not grid:
            raise DistributionError("a transition model needs at least one state")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DistributionError("transition states must be strictly increasing")
        if values.shape != (len(grid), len(grid)):
            raise DistributionError(
                f"transition matrix must be {len(grid)}x{len(grid)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise DistributionError("transition probabilities must be finite and non-negative")
        row_sums = values.sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > NORMALIZE_TOLERANCE)
        if bad.size:
            raise DistributionError(f"transition row {int(bad[0])} sums to {row_sums[bad[0]]!r}")
        # rows are renormalized the same way as bucket masses
        if np.any(np.abs(row_sums - 1.0) > SUM_TOLERANCE):
            values = values / row_sums[:, None]
        values.flags.writeable = False
        object.__setattr__(self, "states", grid)
        object.__setattr__(self, "matrix", values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionModel):
            return NotImplemented
        return self.states == other.states and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.states, self.matrix.tobytes()))

    @classmethod
    def identity(cls, states: Sequence[float]) -> TransitionModel:
        """Return the chain that never leaves its current state."""

        return cls(states, np.eye(len(states)))

    @property
    def is_identity(self) -> bool:
        """Whether every state is absorbing."""

        return bool(np.array_equal(self.matrix, np.eye(len(self.states))))

    def power(self, steps: int) -> np.ndarray:
        """Return the ``steps``-step transition matrix."""

        if steps < 0:
            raise DistributionUsageError("steps must be non-negative")
        return np.linalg.matrix_power(self.matrix, steps)

    def stationary(self) -> np.ndarray:
        """Return the stationary row vector ``pi`` with ``pi @ matrix == pi``.

        Raises
        ------
        DistributionUsageError
            If the chain has more than one stationary distribution.
        """

        basis = null_space(self.matrix.T - np.eye(len(self.states)))
        if basis.shape[1] != 1:
            raise DistributionUsageError(
                f"stationary distribution is not unique ({basis.shape[1]} closed classes)"
            )
        vector = np.abs(basis[:, 0])
        return vector / vector.sum()

    def to_public_dict(self) -> dict[str, Any]:
        """Return the JSON form ``{states, matrix}``."""

        return {"states": list(self.states), "matrix": self.matrix.tolist()}

    @classmethod
    def from_public_dict(cls, payload: Mapping[str, Any]) -> TransitionModel:
        """Build a model from its JSON form."""

        return cls(payload["states"], payload["matrix"])


def check_states(d: BucketedDistribution, t: TransitionModel) -> None:
    """Raise unless the representatives of ``d`` are exactly the chain's states."""

    if tuple(d.reps.tolist()) != t.states:
        raise DistributionUsageError(
            f"memory representatives {tuple(d.reps.tolist())} do not match transition states {t.states}"
        )


def advance(d: BucketedDistribution, t: TransitionModel, steps: int = 1) -> BucketedDistribution:
    """Propagate a memory distribution ``steps`` phases forward.

    Bucket bounds and representatives are kept; only the masses move.  The
    identity chain returns ``d`` itself.
    """

    check_states(d, t)
    if steps == 0 or t.is_identity:
        return d
    moved = d.probs @ t.power(steps)
    return BucketedDistribution(
        Bucket(b.lo, b.hi, b.rep, float(p)) for b, p in zip(d.buckets, np.clip(moved, 0.0, None))
    )


__all__ = ["TransitionModel", "advance", "check_states"]
