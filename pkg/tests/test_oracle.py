"""전수 탐색 오라클과 인덱스 정책 비교"""

import numpy as np
import pytest

from conftest import random_tiny_environment
from vortex.errors import SolverError
from vortex.metrics.pareto import pareto_filter
from vortex.metrics.preference import preference_from_target
from vortex.rmab.reader import load_bundled_environment
from vortex.shaping.models import ShapingReward
from vortex.solver.index import solve_policy
from vortex.solver.oracle import brute_force_optimal, evaluate_policy_exact, scalarized_optima


def _random_shaping(rng, env, low=-0.2):
    return ShapingReward(rng.uniform(low, 0.2, size=env.n_classes))


def test_oracle_on_deterministic_env(det_env):
    # 최적: 라운드 0 에 A 행동 → 라운드 1 에 A 가 상태 1 (0.4 + 1.0)
    result = brute_force_optimal(det_env, ShapingReward.zeros(2))
    assert result.value == pytest.approx(1.4)
    assert result.policy[(0, 0)] == (0,)


def test_index_policy_matches_oracle_on_deterministic_env(det_env):
    shaping = ShapingReward.zeros(2)
    ev = evaluate_policy_exact(det_env, shaping, solve_policy(det_env, shaping))
    assert ev.shaped_return == pytest.approx(1.4)
    assert ev.utility == pytest.approx(1.4)
    assert ev.pulls.tolist() == [2.0, 0.0]
    assert ev.distribution().as_list() == [1.0, 0.0]


def test_oracle_rejects_large_instances():
    env = load_bundled_environment("armman")
    with pytest.raises(SolverError, match="too large for brute force"):
        brute_force_optimal(env, ShapingReward.zeros(env.n_classes))


def test_index_policy_near_optimal_on_random_instances():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        env = random_tiny_environment(rng)
        # 음이 아닌 shaping: 최적값이 양수여야 비율 비교가 의미 있음
        shaping = _random_shaping(rng, env, low=0.0)
        optimum = brute_force_optimal(env, shaping).value
        achieved = evaluate_policy_exact(env, shaping, solve_policy(env, shaping)).shaped_return
        assert achieved <= optimum + 1e-9
        assert achieved >= 0.95 * optimum


def test_index_policy_optimal_for_single_round():
    rng = np.random.default_rng(7)
    for _ in range(50):
        env = random_tiny_environment(rng, horizon=1)
        shaping = _random_shaping(rng, env)
        optimum = brute_force_optimal(env, shaping).value
        achieved = evaluate_policy_exact(env, shaping, solve_policy(env, shaping)).shaped_return
        assert achieved == pytest.approx(optimum, abs=1e-12)


def test_evaluate_rejects_over_budget_policy(det_env):
    with pytest.raises(SolverError, match="budget"):
        evaluate_policy_exact(det_env, ShapingReward.zeros(2), lambda pop: [0, 1])


def test_scalarized_optima_are_monotone_in_lambda():
    env = random_tiny_environment(
        np.random.default_rng(5), max_arms=3, max_budget=1, horizon=2
    )
    pref = preference_from_target([0.8, 0.2], env, kind="kl")
    lambdas = [round(0.1 * i, 1) for i in range(1, 10)]
    optima = scalarized_optima(env, pref, lambdas, utility_scale=float(env.B * env.T))

    U = [o.U for o in optima]
    C = [o.C for o in optima]
    assert all(b >= a for a, b in zip(U, U[1:]))
    assert all(b >= a for a, b in zip(C, C[1:]))

    points = [(o.U, -o.C) for o in optima]
    frontier = pareto_filter([(o.U, o.C) for o in optima])
    assert len(frontier) == len(set(points))


def test_scalarized_optimum_matches_objective(det_env, half_pref):
    (opt,) = scalarized_optima(det_env, half_pref, [0.5], utility_scale=2.0)
    assert opt.J == pytest.approx(0.5 * opt.U / 2.0 - 0.5 * opt.C)
    # 두 클래스를 한 번씩 행동하면 C = 0, U = 1.4 (A 먼저)
    assert opt.C == pytest.approx(0.0, abs=1e-9)
    assert opt.U == pytest.approx(1.4)
