"""인덱스 솔버

arm 타입별 유한 호라이즌 DP 로 우선순위 인덱스를 계산하고,
매 라운드 인덱스 상위 B 개 arm 에 행동합니다.

advantage 인덱스:
    W_0(s) = 0
    W_h(s) = base(s) + sum_s' P(s'|s,0) W_{h-1}(s')       (이후 라운드는 passive 가정)
    index(type, s, h) = Q_h(s,1) - Q_h(s,0)
                      = R_h(z) + sum_s' (P(s'|s,1) - P(s'|s,0)) W_{h-1}(s')

whittle 인덱스:
    passive 행동에 보조금 m 을 주는 단일 arm 유한 호라이즌 문제에서
    act/passive 가 무차별해지는 m 을 이분 탐색으로 찾습니다.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from vortex.errors import SolverError
from vortex.rmab.models import Environment, FloatArray, IntArray, PopulationState
from vortex.shaping.models import ShapingReward

logger = logging.getLogger(__name__)

IndexKind = Literal["advantage", "whittle"]

# Whittle 이분 탐색 허용 오차
WHITTLE_TOLERANCE = 1e-7


def _frozen(a: FloatArray) -> FloatArray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ShapedRewardTable:
    """타입별 기본 보상과 acting 시 더해지는 shaping 보너스

    values[type, s, a] = base[type, s] + a * bonus[type]
    """
    base: FloatArray  # (n_types, 2)
    bonus: FloatArray  # (n_types,)

    @classmethod
    def build(cls, env: Environment, shaping: ShapingReward) -> "ShapedRewardTable":
        """
        Raises:
            SolverError: shaping 길이 불일치, 유한하지 않은 값
        """
        if len(shaping) != env.n_classes:
            raise SolverError(
                f"shaping has {len(shaping)} entries but environment has {env.n_classes} classes"
            )
        if not np.all(np.isfinite(shaping.r)):
            raise SolverError(f"shaping contains non-finite values: {shaping.as_list()}")
        return cls(base=env.type_base, bonus=_frozen(shaping.r[env.type_class]))

    @property
    def values(self) -> FloatArray:
        values = np.repeat(self.base[:, :, None], 2, axis=2)
        values[:, :, 1] += self.bonus[:, None]
        return values


@dataclass(frozen=True, eq=False)
class IndexTable:
    """(타입, 상태, 남은 호라이즌 h) 별 우선순위 인덱스

    values[:, :, 0] 은 남은 라운드가 없는 경우로 사용되지 않습니다.
    """
    values: FloatArray  # (n_types, 2, T+1)
    arm_type_of: IntArray
    kind: IndexKind = "advantage"

    @property
    def horizon(self) -> int:
        return int(self.values.shape[2] - 1)

    def arm_indices(self, pop: PopulationState) -> FloatArray:
        """현재 상태와 남은 호라이즌에서의 arm 별 인덱스"""
        h = self.horizon - pop.round
        if h < 1:
            raise SolverError(f"no rounds remain at round {pop.round} (horizon {self.horizon})")
        return self.values[self.arm_type_of, pop.states.astype(np.int64), h]


@dataclass(frozen=True)
class ActionSelection:
    """라운드 t 에 행동할 arm 집합"""
    acted: Tuple[int, ...]
    round: int


def compute_indices(
    env: Environment,
    shaping: ShapingReward,
    horizon: Optional[int] = None,
) -> IndexTable:
    """advantage 인덱스 테이블 계산

    Args:
        env: 환경
        shaping: 클래스별 shaping 보상
        horizon: 호라이즌 (기본 env.T)

    Raises:
        SolverError: shaping 길이 불일치, 유한하지 않은 값
    """
    T = env.T if horizon is None else horizon
    rewards = ShapedRewardTable.build(env, shaping)
    p_up = env.type_p_up  # (n_types, s, a)
    r_type, base = rewards.bonus, rewards.base
    n_types = len(env.types)

    # 행동에 따른 상태 1 도달 확률의 증분
    lift = p_up[:, :, 1] - p_up[:, :, 0]  # (n_types, s)

    values = np.zeros((n_types, 2, T + 1))
    W = np.zeros((n_types, 2))
    for h in range(1, T + 1):
        gap = (W[:, 1] - W[:, 0])[:, None]
        values[:, :, h] = r_type[:, None] + lift * gap
        W = base + p_up[:, :, 0] * W[:, 1:2] + (1.0 - p_up[:, :, 0]) * W[:, 0:1]

    values.setflags(write=False)
    return IndexTable(values=values, arm_type_of=env.arm_type_of, kind="advantage")


def _subsidized_gap(
    p_up: FloatArray,
    base: FloatArray,
    r_type: FloatArray,
    h: int,
    m: FloatArray,
) -> FloatArray:
    """보조금 m (n_types, 2) 하에서 Q_h(s,1) - Q_h(s,0)"""
    n_types = p_up.shape[0]
    # V[type, s_start, s]: 시작 상태 s_start 의 보조금으로 푼 가치 함수
    V = np.zeros((n_types, 2, 2))
    up = p_up[:, None, :, :]  # (type, 1, s, a)
    for _ in range(h - 1):
        # cont[type, s_start, s, a]
        cont = up * V[:, :, 1, None, None] + (1.0 - up) * V[:, :, 0, None, None]
        q0 = base[:, None, :] + m[:, :, None] + cont[..., 0]
        q1 = base[:, None, :] + r_type[:, None, None] + cont[..., 1]
        V = np.maximum(q0, q1)

    # 첫 라운드: s_start 에서 act vs passive
    cont1 = p_up[:, :, 1] * V[:, :, 1] + (1.0 - p_up[:, :, 1]) * V[:, :, 0]
    cont0 = p_up[:, :, 0] * V[:, :, 1] + (1.0 - p_up[:, :, 0]) * V[:, :, 0]
    return (r_type[:, None] + cont1) - (m + cont0)


def compute_whittle_indices(
    env: Environment,
    shaping: ShapingReward,
    horizon: Optional[int] = None,
    tolerance: float = WHITTLE_TOLERANCE,
) -> IndexTable:
    """유한 호라이즌 Whittle (보조금) 인덱스를 이분 탐색으로 계산"""
    T = env.T if horizon is None else horizon
    rewards = ShapedRewardTable.build(env, shaping)
    p_up = env.type_p_up
    r_type, base = rewards.bonus, rewards.base
    n_types = len(env.types)

    spread = float(np.ptp(base)) if base.size else 0.0
    values = np.zeros((n_types, 2, T + 1))
    for h in range(1, T + 1):
        bound = float(np.max(np.abs(r_type), initial=0.0)) + h * spread + 1.0
        lo = np.full((n_types, 2), -bound)
        hi = np.full((n_types, 2), bound)
        steps = int(math.ceil(math.log2(2 * bound / tolerance)))
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            act_better = _subsidized_gap(p_up, base, r_type, h, mid) > 0
            lo = np.where(act_better, mid, lo)
            hi = np.where(act_better, hi, mid)
        values[:, :, h] = 0.5 * (lo + hi)

    values.setflags(write=False)
    logger.debug("computed whittle indices for %d types, horizon %d", n_types, T)
    return IndexTable(values=values, arm_type_of=env.arm_type_of, kind="whittle")


def top_b(scores: FloatArray, B: int, exact_budget: bool = True) -> Tuple[int, ...]:
    """점수 상위 B 개 arm (동점은 낮은 인덱스 우선, 오름차순 반환)

    exact_budget=False 이면 양수 점수인 arm 만 행동합니다 (<= B).
    """
    scores = np.asarray(scores, dtype=np.float64)
    k = min(B, scores.shape[0])
    order = np.argsort(-scores, kind="stable")[:k]
    if not exact_budget:
        order = order[scores[order] > 0]
    return tuple(sorted(int(i) for i in order))


def select_actions(
    indices: IndexTable,
    pop: PopulationState,
    B: int,
    exact_budget: bool = True,
) -> ActionSelection:
    """현재 상태에서 인덱스 상위 min(B, N) 개 arm 선택"""
    return ActionSelection(acted=top_b(indices.arm_indices(pop), B, exact_budget), round=pop.round)


class IndexPolicy:
    """인덱스 테이블 기반 폐루프 정책 (라운드 t, 상태 s → 행동 집합)"""

    def __init__(self, table: IndexTable, B: int, exact_budget: bool = True):
        self.table = table
        self.B = B
        self.exact_budget = exact_budget

    def select(self, pop: PopulationState) -> ActionSelection:
        return select_actions(self.table, pop, self.B, self.exact_budget)

    def __call__(self, pop: PopulationState) -> Tuple[int, ...]:
        return self.select(pop).acted


def solve_policy(
    env: Environment,
    shaping: ShapingReward,
    index: IndexKind = "advantage",
    exact_budget: bool = True,
) -> IndexPolicy:
    """shaped 보상 R_base + R_h 에 대한 예산 제약 정책 계산"""
    if index == "advantage":
        table = compute_indices(env, shaping)
    elif index == "whittle":
        table = compute_whittle_indices(env, shaping)
    else:
        raise SolverError(f"Unknown index kind: {index}")
    return IndexPolicy(table, env.B, exact_budget)
