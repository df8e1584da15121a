"""Monte Carlo estimates against analytic expected costs."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from lec_optimizer.catalog import Environment, load_problem_files
from lec_optimizer.core.config import SimulationSettings
from lec_optimizer.core.distributions import discrete
from lec_optimizer.core.markov import TransitionModel, advance
from lec_optimizer.costs.formulas import JoinMethod
from lec_optimizer.optimizer import OptimizerUsageError, Plan, optimize, optimize_lec_d
from lec_optimizer.validation import (
    RNG_ALGORITHM,
    compare,
    exact_expected_cost,
    random_instance,
    sample_trajectories,
    sample_trajectory,
    simulate,
)
from lec_optimizer.validation.simulator import make_rng, summarize

FIXTURES = Path(__file__).parent / "fixtures"
SORT_MERGE = Plan(order=("A", "B"), methods=(JoinMethod.SORT_MERGE,))
GRACE_HASH = Plan(order=("A", "B"), methods=(JoinMethod.GRACE_HASH,), final_sort=True)


def _load(name: str):
    root = FIXTURES / name
    return load_problem_files(root / "catalog.json", root / "query.json", root / "env.json")


def test_generator_is_reproducible() -> None:
    assert make_rng(5).random(4).tolist() == make_rng(5).random(4).tolist()
    assert make_rng(5).random(4).tolist() != make_rng(6).random(4).tolist()


def test_summarize() -> None:
    assert summarize(np.full(10, 7.5)) == (7.5, 0.0)
    mean, std_error = summarize(np.array([1.0, 2.0, 3.0]))
    assert mean == pytest.approx(2.0)
    assert std_error == pytest.approx(1.0 / np.sqrt(3.0))
    with pytest.raises(OptimizerUsageError):
        summarize(np.array([]))


def test_static_and_identity_trajectories_are_constant() -> None:
    memory = discrete({100.0: 0.3, 1000.0: 0.7})
    environments = [
        Environment(memory),
        Environment(memory, TransitionModel.identity([100.0, 1000.0])),
    ]

    for environment in environments:
        paths = sample_trajectories(environment, 5, 500, seed=3)
        assert paths.shape == (500, 5)
        assert np.all(paths == paths[:, :1])
        assert set(np.unique(paths)) <= {100.0, 1000.0}


def test_absorbing_state_captures_every_path() -> None:
    memory = discrete({100.0: 0.5, 1000.0: 0.5})
    environment = Environment(memory, TransitionModel([100.0, 1000.0], [[1.0, 0.0], [1.0, 0.0]]))

    paths = sample_trajectories(environment, 4, 1_000, seed=11)

    assert np.all(paths[:, 1:] == 100.0)
    assert 0 < np.count_nonzero(paths[:, 0] == 1000.0) < 1_000


def test_trajectory_marginals_follow_the_chain() -> None:
    _, _, environment = _load("dynamic_three")
    trials = 40_000

    paths = sample_trajectories(environment, 3, trials, seed=1)
    expected = advance(environment.memory, environment.transition, 2).probs

    for state, p in zip(environment.transition.states, expected):
        observed = np.count_nonzero(paths[:, 2] == state) / trials
        assert abs(observed - p) <= 4.0 * np.sqrt(p * (1.0 - p) / trials) + 1e-12


def test_single_trajectory_and_bad_arguments() -> None:
    _, _, environment = _load("dynamic_three")

    path = sample_trajectory(environment, 3, seed=2)

    assert len(path) == 3
    assert path == sample_trajectories(environment, 3, 1, seed=2)[0].tolist()
    with pytest.raises(OptimizerUsageError):
        sample_trajectories(environment, 0, 10)
    with pytest.raises(OptimizerUsageError):
        sample_trajectories(environment, 3, 0)


def test_deterministic_instance_has_zero_error() -> None:
    catalog, query, _ = _load("example1")
    environment = Environment(discrete({2000.0: 1.0}))

    report = simulate(SORT_MERGE, catalog, query, environment, SimulationSettings(trials=1_000))

    assert report.mean == 2.8e6
    assert report.std_error == 0.0
    assert report.rng_algorithm == RNG_ALGORITHM


def test_sort_merge_plan_mean_matches_the_analytic_cost() -> None:
    catalog, query, environment = _load("example1")

    report = simulate(SORT_MERGE, catalog, query, environment, SimulationSettings(trials=20_000, seed=7))

    assert report.trials == 20_000
    assert report.seed == 7
    assert report.std_error > 0.0
    assert abs(report.mean - 3_360_000.0) <= 4.0 * report.std_error


def test_reports_depend_only_on_seed_and_chunking() -> None:
    catalog, query, environment = _load("dynamic_three")
    plan = optimize("lec-c", catalog, query, environment)
    serial = SimulationSettings(trials=5_000, seed=42, chunk_size=1_000)
    threaded = SimulationSettings(trials=5_000, seed=42, chunk_size=1_000, workers=2)

    first = simulate(plan, catalog, query, environment, serial)

    assert simulate(plan, catalog, query, environment, serial) == first
    assert simulate(plan, catalog, query, environment, threaded) == first
    other = simulate(plan, catalog, query, environment, SimulationSettings(trials=5_000, seed=43, chunk_size=1_000))
    assert other.mean != first.mean


def test_compare_ranks_grace_hash_first() -> None:
    catalog, query, environment = _load("example1")

    report = compare([SORT_MERGE, GRACE_HASH], catalog, query, environment, SimulationSettings(trials=20_000))

    leader, runner_up = report.per_plan
    assert leader.index == 1
    assert leader.mean == pytest.approx(2_812_000.0)
    assert leader.std_error == 0.0
    assert (leader.diff_mean, leader.diff_std_error) == (0.0, 0.0)
    assert runner_up.index == 0
    assert runner_up.diff_mean == pytest.approx(runner_up.mean - leader.mean)
    assert report.mean == leader.mean
    assert [item["index"] for item in report.to_public_dict()["per_plan"]] == [1, 0]


def test_identical_plans_differ_by_nothing() -> None:
    catalog, query, environment = _load("example1")

    report = compare([SORT_MERGE, SORT_MERGE], catalog, query, environment, SimulationSettings(trials=2_000))

    assert [outcome.index for outcome in report.per_plan] == [0, 1]
    assert all(outcome.diff_mean == 0.0 and outcome.diff_std_error == 0.0 for outcome in report.per_plan)


def test_compare_needs_plans() -> None:
    catalog, query, environment = _load("example1")

    with pytest.raises(OptimizerUsageError):
        compare([], catalog, query, environment)


@pytest.mark.parametrize("seed", range(20))
def test_lec_c_is_not_beaten_by_lsc_on_shared_samples(seed: int) -> None:
    catalog, query, environment = random_instance(600 + seed, 2 + seed % 4, 3)
    plans = [optimize("lec-c", catalog, query, environment), optimize("lsc", catalog, query, environment)]

    report = compare(plans, catalog, query, environment, SimulationSettings(trials=4_000, seed=seed))

    (lec_c,) = [outcome for outcome in report.per_plan if outcome.index == 0]
    assert lec_c.diff_mean <= 4.0 * lec_c.diff_std_error + 1e-9 * abs(lec_c.mean)


@pytest.mark.acceptance
def test_simulated_means_agree_with_exact_expectations() -> None:
    hits = 0
    for seed in range(10):
        catalog, query, environment = random_instance(
            700 + seed, 3, 3, size_buckets=2, selectivity_buckets=2, dynamic=seed % 2 == 0
        )
        plan = optimize_lec_d(catalog, query, environment)
        exact = exact_expected_cost(plan, catalog, query, environment)

        report = simulate(plan, catalog, query, environment, SimulationSettings(trials=100_000, seed=seed))

        if abs(report.mean - exact) <= 4.0 * report.std_error + 1e-9 * abs(exact):
            hits += 1
    assert hits >= 9
