"""전수 탐색 오라클 (작은 인스턴스 전용)

결합 상태 공간 {0,1}^N 위의 정확한 동적 계획법입니다.
인덱스 정책의 근사 품질 검증과 스칼라화 최적점 계산에 사용합니다.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from vortex.errors import SolverError
from vortex.metrics.divergence import divergence
from vortex.metrics.models import FeatureDistribution, PreferenceSpec
from vortex.rmab.models import Environment, FloatArray, PopulationState
from vortex.shaping.models import ShapingReward
from vortex.shaping.scalarization import scalarized_objective
from vortex.solver.index import ShapedRewardTable

logger = logging.getLogger(__name__)

MAX_ARMS = 4
MAX_BUDGET = 2
MAX_HORIZON = 4

# scalarized_optima 가 열거하는 정책 수 상한
MAX_ENUMERATED_POLICIES = 200_000

# (round, 결합 상태 번호) → 행동 집합
PolicyTable = Dict[Tuple[int, int], Tuple[int, ...]]


@dataclass(frozen=True)
class OracleResult:
    """전수 탐색 최적해"""
    value: float
    policy: PolicyTable


@dataclass(frozen=True, eq=False)
class PolicyEvaluation:
    """결정적 마르코프 정책의 정확한 기댓값"""
    shaped_return: float
    utility: float
    pulls: FloatArray  # 클래스별 기대 pull 수

    def distribution(self) -> FeatureDistribution:
        return FeatureDistribution(self.pulls / self.pulls.sum())


@dataclass(frozen=True)
class ScalarizedOptimum:
    """λ 별 스칼라화 최적점"""
    lam: float
    U: float
    C: float
    J: float
    policy: PolicyTable


class _JointModel:
    """결합 상태 전이/보상 사전 계산"""

    def __init__(self, env: Environment, shaping: ShapingReward, exact_budget: bool = True):
        if env.N > MAX_ARMS or env.B > MAX_BUDGET or env.T > MAX_HORIZON:
            raise SolverError(
                f"instance too large for brute force (N={env.N}, B={env.B}, T={env.T}; "
                f"limits N<={MAX_ARMS}, B<={MAX_BUDGET}, T<={MAX_HORIZON})"
            )
        self.env = env
        self.r_arm = ShapedRewardTable.build(env, shaping).bonus[env.arm_type_of]
        self.states = np.array(list(itertools.product((0, 1), repeat=env.N)), dtype=np.int64)
        self.weights = 2 ** np.arange(env.N - 1, -1, -1)

        k = min(env.B, env.N)
        sizes = [k] if exact_budget else range(0, k + 1)
        self.subsets: List[Tuple[int, ...]] = [
            c for size in sizes for c in itertools.combinations(range(env.N), size)
        ]
        self._cache: Dict[Tuple[int, Tuple[int, ...]], FloatArray] = {}

    @property
    def n_states(self) -> int:
        return int(self.states.shape[0])

    def state_id(self, states: np.ndarray) -> int:
        return int(np.dot(np.asarray(states, dtype=np.int64), self.weights))

    def base_reward(self, x: int) -> float:
        env = self.env
        return float(env.type_base[env.arm_type_of, self.states[x]].sum())

    def shaping_reward(self, acted: Tuple[int, ...]) -> float:
        return float(self.r_arm[list(acted)].sum()) if acted else 0.0

    def transition(self, x: int, acted: Tuple[int, ...]) -> FloatArray:
        """P(x' | x, acted) 를 모든 x' 에 대해 반환"""
        key = (x, acted)
        probs = self._cache.get(key)
        if probs is None:
            env = self.env
            a = np.zeros(env.N, dtype=np.int64)
            a[list(acted)] = 1
            q = env.type_p_up[env.arm_type_of, self.states[x], a]
            probs = np.prod(np.where(self.states == 1, q, 1.0 - q), axis=1)
            self._cache[key] = probs
        return probs


def brute_force_optimal(
    env: Environment,
    shaping: ShapingReward,
    exact_budget: bool = True,
) -> OracleResult:
    """결합 상태 DP 로 기대 shaped 누적 보상의 최댓값 계산

    Raises:
        SolverError: N > 4, B > 2, T > 4
    """
    model = _JointModel(env, shaping, exact_budget)
    V_next = np.zeros(model.n_states)
    policy: PolicyTable = {}
    for t in range(env.T - 1, -1, -1):
        V = np.empty(model.n_states)
        for x in range(model.n_states):
            base = model.base_reward(x)
            best_value, best_action = -np.inf, ()
            for acted in model.subsets:
                q = base + model.shaping_reward(acted) + float(model.transition(x, acted) @ V_next)
                if q > best_value:
                    best_value, best_action = q, acted
            V[x] = best_value
            policy[(t, x)] = best_action
        V_next = V

    x0 = model.state_id(env.initial_population().states)
    return OracleResult(value=float(V_next[x0]), policy=policy)


def _evaluate(
    model: _JointModel,
    choose: Callable[[int, int], Tuple[int, ...]],
) -> PolicyEvaluation:
    env = model.env
    n_classes = env.n_classes
    V_shaped = np.zeros(model.n_states)
    V_util = np.zeros(model.n_states)
    V_pulls = np.zeros((model.n_states, n_classes))
    for t in range(env.T - 1, -1, -1):
        shaped = np.empty(model.n_states)
        util = np.empty(model.n_states)
        pulls = np.empty((model.n_states, n_classes))
        for x in range(model.n_states):
            acted = choose(t, x)
            probs = model.transition(x, acted)
            base = model.base_reward(x)
            counts = np.bincount(env.arm_class_of[list(acted)], minlength=n_classes)
            shaped[x] = base + model.shaping_reward(acted) + probs @ V_shaped
            util[x] = base + probs @ V_util
            pulls[x] = counts + probs @ V_pulls
        V_shaped, V_util, V_pulls = shaped, util, pulls

    x0 = model.state_id(env.initial_population().states)
    return PolicyEvaluation(
        shaped_return=float(V_shaped[x0]),
        utility=float(V_util[x0]),
        pulls=V_pulls[x0].copy(),
    )


def evaluate_policy_exact(
    env: Environment,
    shaping: ShapingReward,
    policy: Callable[[PopulationState], Sequence[int]],
) -> PolicyEvaluation:
    """결정적 정책의 기대 shaped 보상, 기대 효용, 클래스별 기대 pull 수"""
    model = _JointModel(env, shaping, exact_budget=False)

    def choose(t: int, x: int) -> Tuple[int, ...]:
        acted = tuple(sorted(int(i) for i in policy(PopulationState(model.states[x], round=t))))
        if len(acted) > env.B:
            raise SolverError(f"policy acted on {len(acted)} arms with budget B={env.B}")
        return acted

    return _evaluate(model, choose)


def _reachable_states(model: _JointModel) -> List[List[int]]:
    """라운드별 (임의 행동 하에서) 도달 가능한 결합 상태"""
    env = model.env
    reachable = [[model.state_id(env.initial_population().states)]]
    for _ in range(1, env.T):
        nxt = set()
        for x in reachable[-1]:
            for acted in model.subsets:
                nxt.update(int(i) for i in np.flatnonzero(model.transition(x, acted) > 0))
        reachable.append(sorted(nxt))
    return reachable


def scalarized_optima(
    env: Environment,
    pref: PreferenceSpec,
    lambdas: Sequence[float],
    utility_scale: float = 1.0,
    exact_budget: bool = True,
) -> List[ScalarizedOptimum]:
    """λ 별 J_λ = λ U/scale - (1-λ) C 의 정확한 최적점

    도달 가능한 결정 지점 위의 모든 결정적 마르코프 정책을 열거합니다.
    C 는 기대 방문 분포에 대한 divergence 입니다.
    J 가 1e-12 이내로 같은 후보 중에서는 U 가 큰 쪽을 고릅니다.
    """
    model = _JointModel(env, ShapingReward.zeros(env.n_classes), exact_budget)
    reachable = _reachable_states(model)
    decisions = [(t, x) for t, xs in enumerate(reachable) for x in xs]

    n_policies = len(model.subsets) ** len(decisions)
    if n_policies > MAX_ENUMERATED_POLICIES:
        raise SolverError(
            f"{n_policies} policies to enumerate exceeds limit {MAX_ENUMERATED_POLICIES}"
        )
    logger.debug("enumerating %d policies over %d decision points", n_policies, len(decisions))

    default = model.subsets[0]
    candidates: List[Tuple[float, float, PolicyTable]] = []
    for choice in itertools.product(model.subsets, repeat=len(decisions)):
        table: PolicyTable = dict(zip(decisions, choice))
        ev = _evaluate(model, lambda t, x: table.get((t, x), default))
        if ev.pulls.sum() <= 0:
            continue
        C = divergence(ev.distribution(), pref)
        candidates.append((ev.utility, C, table))

    if not candidates:
        raise SolverError("no policy with at least one pull")

    optima: List[ScalarizedOptimum] = []
    for lam in lambdas:
        scores = [scalarized_objective(U, C, lam, utility_scale) for U, C, _ in candidates]
        best = max(scores)
        U, C, table = max(
            (c for c, s in zip(candidates, scores) if s >= best - 1e-12),
            key=lambda c: c[0],
        )
        optima.append(ScalarizedOptimum(lam=float(lam), U=U, C=C, J=best, policy=table))
    return optima
