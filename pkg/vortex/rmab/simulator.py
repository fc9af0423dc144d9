"""RMAB 시뮬레이터

한 라운드의 전이(step)와 T 라운드 전개(rollout)를 수행합니다.
보상은 전이 이전 상태 기준이며, 난수는 라운드당 N 개를 한 번에 뽑습니다.
"""

from __future__ import annotations

import hashlib
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from vortex.errors import SimulationError
from vortex.rmab.models import Environment, FloatArray, PopulationState, StepRecord, Trajectory

# 라운드 t 의 집단 상태 → 행동할 arm 인덱스
Policy = Callable[[PopulationState], Sequence[int]]

StreamKey = Union[int, str]


def _key_to_int(key: StreamKey) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"stream key must be non-negative, got {key}")
        return int(key)
    return int.from_bytes(hashlib.sha256(str(key).encode("utf-8")).digest()[:4], "little")


def _seed_sequence(master_seed: int, keys: Tuple[StreamKey, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=tuple(_key_to_int(k) for k in keys))


def spawn_stream(master_seed: int, *keys: StreamKey) -> np.random.Generator:
    """마스터 시드와 키로부터 독립 난수 스트림 생성

    같은 (master_seed, keys) 는 항상 같은 스트림을 돌려줍니다.
    예: spawn_stream(seed, "env") 는 공통 난수(CRN) 스트림,
        spawn_stream(seed, "episode", k) 는 에피소드별 스트림.
    """
    return np.random.Generator(np.random.PCG64(_seed_sequence(master_seed, keys)))


def stream_seed(master_seed: int, *keys: StreamKey) -> int:
    """스트림을 식별하는 32비트 시드 (EpisodeRecord 기록용)"""
    return int(_seed_sequence(master_seed, keys).generate_state(1)[0])


def _validate_actions(env: Environment, actions: Iterable[int]) -> np.ndarray:
    acted = np.asarray(list(actions), dtype=np.int64)
    if acted.size and (acted.min() < 0 or acted.max() >= env.N):
        bad = [int(i) for i in acted if i < 0 or i >= env.N]
        raise SimulationError(f"invalid arm index {bad} for population of {env.N}")
    unique = np.unique(acted)
    if unique.size != acted.size:
        raise SimulationError(f"duplicate arm indices in action set {sorted(acted.tolist())}")
    if unique.size > env.B:
        raise SimulationError(f"action set of size {unique.size} exceeds budget B={env.B}")
    return unique


def step(
    env: Environment,
    pop: PopulationState,
    actions: Iterable[int],
    rng: np.random.Generator,
) -> Tuple[PopulationState, FloatArray]:
    """한 라운드 진행

    Args:
        env: 환경
        pop: 현재 집단 상태
        actions: 행동할 arm 인덱스 (|actions| <= B)
        rng: 난수 스트림

    Returns:
        (다음 집단 상태, arm 별 기본 보상). 보상은 전이 이전 상태 기준.

    Raises:
        SimulationError: 예산 초과, 잘못된 arm 인덱스, 호라이즌 초과
    """
    if pop.states.shape != (env.N,):
        raise SimulationError(f"state vector has shape {pop.states.shape}, expected ({env.N},)")
    if pop.round >= env.T:
        raise SimulationError(f"round {pop.round} is past the horizon T={env.T}")

    acted = _validate_actions(env, actions)
    a = np.zeros(env.N, dtype=np.int64)
    a[acted] = 1

    states = pop.states.astype(np.int64)
    rewards = env.type_base[env.arm_type_of, states]
    p_up = env.type_p_up[env.arm_type_of, states, a]

    u = rng.random(env.N)
    next_states = (u < p_up).astype(np.int8)
    return PopulationState(states=next_states, round=pop.round + 1), rewards


def rollout(
    env: Environment,
    policy: Policy,
    rng: np.random.Generator,
    T: Optional[int] = None,
) -> Trajectory:
    """정책을 T 라운드 전개하여 궤적 수집

    (env, policy, rng 시드) 가 같으면 궤적은 비트 단위로 동일합니다.
    """
    horizon = env.T if T is None else T
    if horizon < 1 or horizon > env.T:
        raise SimulationError(f"rollout length must be in [1, {env.T}], got {horizon}")

    pop = env.initial_population()
    records: List[StepRecord] = []
    for _ in range(horizon):
        acted = tuple(sorted(int(i) for i in policy(pop)))
        next_pop, rewards = step(env, pop, acted, rng)
        records.append(StepRecord(actions=acted, states_before=pop.states, base_rewards=rewards))
        pop = next_pop
    return Trajectory(records=tuple(records))
