"""ARMMAN 전체 규모 통계 검증 (느림: pytest -m slow)"""

from math import comb

import numpy as np
import pytest

from vortex.config import RunConfig
from vortex.core import VortexRunner
from vortex.metrics.evaluation import coverage
from vortex.rmab.reader import load_bundled_environment
from vortex.rmab.simulator import rollout, spawn_stream
from vortex.shaping.models import ShapingReward
from vortex.solver.index import solve_policy

SEEDS = range(50)

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def armman():
    return load_bundled_environment("armman")


def _sign_test_p(successes: int, n: int) -> float:
    """단측 부호 검정 p 값 P(X >= successes), X ~ Bin(n, 1/2)"""
    return sum(comb(n, i) for i in range(successes, n + 1)) / 2**n


def _run(env, directive, seed, episodes=10):
    cfg = RunConfig(
        preference={"directive": directive, "rho": 0.75},
        episodes=episodes,
        seed=seed,
        early_stop={"patience": 0},
    )
    return VortexRunner(cfg, env=env).run()


def test_base_policy_favors_high_income(armman):
    policy = solve_policy(armman, ShapingReward.zeros(armman.n_classes))
    shares = [
        coverage(rollout(armman, policy, spawn_stream(seed, "env")), armman)["income"]["High"]
        for seed in SEEDS
    ]
    assert 0.68 <= float(np.mean(shares)) <= 0.88


def test_favor_low_income_shifts_coverage(armman):
    result = _run(armman, "favor LI", seed=0)
    base, final = result.records[0], result.final
    assert final.coverage["income"]["Low"] >= 0.60
    assert final.U >= 0.8 * base.U


@pytest.mark.parametrize("directive", ["HI", "LI", "HE", "LE", "Old", "Young"])
def test_directives_trade_utility_for_alignment(armman, directive):
    wins = 0
    for seed in SEEDS:
        records = _run(armman, directive, seed).records
        # 에피소드 0 은 공통 난수 아래의 shaping 없는 기준 정책
        base, final = records[0], records[-1]
        if final.U <= base.U and final.C < base.C:
            wins += 1
    assert _sign_test_p(wins, len(SEEDS)) < 0.01
