"""shaping 데이터 모델"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from vortex.errors import ShapingError
from vortex.rmab.models import FloatArray


@dataclass(frozen=True, eq=False)
class ShapingReward:
    """특성 클래스별 shaping 보상 R_h(z)

    행동한 arm 에만 기본 보상에 더해집니다.
    """
    r: FloatArray

    def __post_init__(self):
        r = np.array(self.r, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(r)):
            raise ShapingError(f"shaping reward must be finite, got {r.tolist()}")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @classmethod
    def zeros(cls, n_classes: int) -> "ShapingReward":
        return cls(np.zeros(n_classes))

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "ShapingReward":
        return cls(np.asarray(values, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.r.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ShapingReward):
            return NotImplemented
        return bool(np.array_equal(self.r, other.r))

    __hash__ = None  # type: ignore[assignment]

    def as_list(self) -> List[float]:
        return [float(v) for v in self.r]

    def max_abs_change(self, other: "ShapingReward") -> float:
        """두 shaping 벡터의 max-norm 차이"""
        return float(np.max(np.abs(self.r - other.r))) if len(self) else 0.0


@dataclass(frozen=True)
class ScalarizationConfig:
    """스칼라화 설정

    utility_scale 은 U 를 나누는 정규화 상수입니다. 1.0 이면 원식 그대로,
    B*T 이면 pull 당 효용으로 바꿔 U 와 C 의 크기를 맞춥니다.
    smoothing 은 감쇠 추정기에서 평균 방문 분포를 목표 쪽으로 섞는 비율입니다.
    """
    lam: float
    B: int
    T: int
    eta0: float = 0.5
    R_max: float = 1.0
    utility_scale: float = 1.0
    smoothing: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ShapingError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.eta0 < 0 or not math.isfinite(self.eta0):
            raise ShapingError(f"eta0 must be a finite non-negative number, got {self.eta0}")
        if self.R_max <= 0:
            raise ShapingError(f"R_max must be positive, got {self.R_max}")
        if self.utility_scale <= 0:
            raise ShapingError(f"utility_scale must be positive, got {self.utility_scale}")
        if self.B < 1 or self.T < 1:
            raise ShapingError(f"B and T must be >= 1, got B={self.B}, T={self.T}")
        if not (0.0 <= self.smoothing < 1.0):
            raise ShapingError(f"smoothing must lie in [0, 1), got {self.smoothing}")

    @property
    def pulls(self) -> int:
        """B*T: 에피소드 전체 pull 수"""
        return self.B * self.T

    @property
    def pull_ratio(self) -> float:
        """κ = B*T / utility_scale"""
        return self.pulls / self.utility_scale


@dataclass(frozen=True, eq=False)
class GradientEstimate:
    """스칼라화 목적함수의 R_h 방향 기울기 추정치 g^k"""
    g: FloatArray

    def __post_init__(self):
        g = np.array(self.g, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(g)):
            raise ShapingError(f"gradient estimate must be finite, got {g.tolist()}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    def centered(self) -> "GradientEstimate":
        """클래스 공통 성분 제거 (정확히-B 솔버에서 보이지 않는 방향)"""
        return GradientEstimate(self.g - self.g.mean()) if self.g.size else self
