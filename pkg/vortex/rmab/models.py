"""RMAB 환경 데이터 모델

모든 모델은 생성 후 불변이며 스레드 간 공유가 가능합니다.
numpy 배열은 생성 시 읽기 전용으로 고정됩니다.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

# 상태/행동 공간 (2-state, 2-action)
N_STATES = 2
N_ACTIONS = 2

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]


def _frozen(array: np.ndarray) -> np.ndarray:
    """배열을 읽기 전용으로 고정"""
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FeatureDimension:
    """특성 차원 (예: income = Low / High)"""
    name: str
    levels: Tuple[str, ...]


@dataclass(frozen=True)
class FeatureClass:
    """특성 클래스 z (차원별 레벨 조합)"""
    id: int
    labels: Tuple[Tuple[str, str], ...]  # (dimension, level) 순서쌍

    @property
    def name(self) -> str:
        return ", ".join(f"{dim}={level}" for dim, level in self.labels)

    def level_of(self, dimension: str) -> Optional[str]:
        for dim, level in self.labels:
            if dim == dimension:
                return level
        return None


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """전이 확률 p[s][a][s']"""
    p: FloatArray

    def __post_init__(self):
        if self.p.shape != (N_STATES, N_ACTIONS, N_STATES):
            raise ValueError(f"kernel shape must be (2, 2, 2), got {self.p.shape}")
        _frozen(self.p)

    @classmethod
    def from_up_probabilities(cls, p_up: FloatArray) -> "TransitionKernel":
        """p(s'=1 | s, a) 배열 (2, 2) 로부터 생성. p(s'=0) 은 여집합으로 계산."""
        p_up = np.asarray(p_up, dtype=np.float64)
        p = np.empty((N_STATES, N_ACTIONS, N_STATES), dtype=np.float64)
        p[:, :, 1] = p_up
        p[:, :, 0] = 1.0 - p_up
        return cls(p=p)

    @property
    def p_up(self) -> FloatArray:
        """p(s'=1 | s, a), shape (2, 2)"""
        return self.p[:, :, 1]

    def is_action_invariant(self) -> bool:
        return bool(np.array_equal(self.p[:, 0, :], self.p[:, 1, :]))


@dataclass(frozen=True, eq=False)
class ArmType:
    """arm 타입: 특성 클래스 + 전이 커널 + 상태별 기본 보상"""
    id: int
    feature_class: FeatureClass
    kernel: TransitionKernel
    base_reward: Tuple[float, float]  # state 0, state 1
    count: int
    initial_state: int = 0


@dataclass(frozen=True, eq=False)
class Environment:
    """RMAB 환경 (arm 집단 + 예산 B + 호라이즌 T)"""
    name: str
    features: Tuple[FeatureDimension, ...]
    classes: Tuple[FeatureClass, ...]
    types: Tuple[ArmType, ...]
    arm_type_of: IntArray
    B: int
    T: int
    aliases: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    description: str = ""

    # 벡터화된 조회 테이블 (__post_init__ 에서 채움)
    type_p_up: FloatArray = field(init=False, repr=False)
    type_base: FloatArray = field(init=False, repr=False)
    type_class: IntArray = field(init=False, repr=False)
    arm_class_of: IntArray = field(init=False, repr=False)

    def __post_init__(self):
        arm_type_of = _frozen(np.asarray(self.arm_type_of, dtype=np.int64))
        object.__setattr__(self, "arm_type_of", arm_type_of)

        type_p_up = np.stack([t.kernel.p_up for t in self.types]) if self.types else np.empty(
            (0, N_STATES, N_ACTIONS)
        )
        type_base = np.array([t.base_reward for t in self.types], dtype=np.float64).reshape(-1, 2)
        type_class = np.array([t.feature_class.id for t in self.types], dtype=np.int64)
        object.__setattr__(self, "type_p_up", _frozen(type_p_up))
        object.__setattr__(self, "type_base", _frozen(type_base))
        object.__setattr__(self, "type_class", _frozen(type_class))
        object.__setattr__(self, "arm_class_of", _frozen(type_class[arm_type_of]))

    @property
    def N(self) -> int:
        return int(self.arm_type_of.shape[0])

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def pulls_per_round(self) -> int:
        """정확히-B 의미론에서 라운드당 행동 수"""
        return min(self.B, self.N)

    def class_counts(self) -> IntArray:
        """클래스별 arm 수"""
        return np.bincount(self.arm_class_of, minlength=self.n_classes)

    def class_labels(self) -> List[str]:
        return [c.name for c in self.classes]

    def initial_population(self) -> "PopulationState":
        """초기 상태 (타입별 initial_state, 기본 0)"""
        init = np.array([t.initial_state for t in self.types], dtype=np.int8)
        return PopulationState(states=init[self.arm_type_of], round=0)

    def summary(self) -> Dict[str, object]:
        """환경 요약 (validate-env, 프롬프트 컨텍스트용)"""
        return {
            "name": self.name,
            "N": self.N,
            "B": self.B,
            "T": self.T,
            "types": len(self.types),
            "classes": [
                {"id": c.id, "name": c.name, "count": int(n)}
                for c, n in zip(self.classes, self.class_counts())
            ],
        }


@dataclass(frozen=True, eq=False)
class PopulationState:
    """집단 상태 s(t) 와 현재 라운드 t"""
    states: npt.NDArray[np.int8]
    round: int = 0

    def __post_init__(self):
        object.__setattr__(self, "states", _frozen(np.asarray(self.states, dtype=np.int8)))


@dataclass(frozen=True, eq=False)
class StepRecord:
    """한 라운드의 기록"""
    actions: Tuple[int, ...]  # 오름차순 arm 인덱스
    states_before: npt.NDArray[np.int8]
    base_rewards: FloatArray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """라운드 1..T 의 (행동, 사전 상태, 기본 보상) 기록"""
    records: Tuple[StepRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def acted_sets(self) -> List[Tuple[int, ...]]:
        return [r.actions for r in self.records]

    def digest(self) -> str:
        """궤적 전체의 sha256 (결정성 검사용)"""
        h = hashlib.sha256()
        for r in self.records:
            h.update(np.asarray(r.actions, dtype=np.int64).tobytes())
            h.update(r.states_before.tobytes())
            h.update(r.base_rewards.tobytes())
        return h.hexdigest()
