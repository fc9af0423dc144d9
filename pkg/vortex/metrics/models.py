"""지표 데이터 모델"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from vortex.errors import MetricsError, UndefinedDistributionError
from vortex.rmab.models import FloatArray

DivergenceKind = Literal["kl", "tv"]

# 분포 합 허용 오차
DISTRIBUTION_TOLERANCE = 1e-9

# dimension → level → 비율
Coverage = Dict[str, Dict[str, float]]


@dataclass(frozen=True, eq=False)
class FeatureDistribution:
    """특성 클래스별 pull 비율 D(z)"""
    d: FloatArray

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64).reshape(-1)
        if d.size == 0:
            raise MetricsError("distribution must have at least one class")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise MetricsError(f"distribution entries must be finite and >= 0, got {d.tolist()}")
        if abs(d.sum() - 1.0) > DISTRIBUTION_TOLERANCE:
            raise MetricsError(f"distribution sums to {d.sum():.12g}, expected 1")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_counts(cls, counts: Sequence[float]) -> "FeatureDistribution":
        counts = np.asarray(counts, dtype=np.float64)
        total = counts.sum()
        if total <= 0:
            raise UndefinedDistributionError("no pulls recorded; feature distribution is undefined")
        return cls(counts / total)

    def __len__(self) -> int:
        return int(self.d.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureDistribution):
            return NotImplemented
        return bool(np.array_equal(self.d, other.d))

    __hash__ = None  # type: ignore[assignment]

    def as_list(self) -> List[float]:
        return [float(v) for v in self.d]


@dataclass(frozen=True, eq=False)
class PreferenceSpec:
    """이해관계자 선호: 지시문 + 목표 분포 + divergence 종류

    focus 는 지시문이 가리키는 (dimension, level) 로 피드백 문구에 쓰입니다.
    """
    directive_text: str
    target: FeatureDistribution
    kind: DivergenceKind = "kl"
    class_labels: Tuple[str, ...] = ()
    focus: Optional[Tuple[str, str]] = None
    rho: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("kl", "tv"):
            raise MetricsError(f"Unknown divergence kind: {self.kind}")
        if self.class_labels and len(self.class_labels) != len(self.target):
            raise MetricsError(
                f"{len(self.class_labels)} class labels for a {len(self.target)}-class target"
            )

    @property
    def n_classes(self) -> int:
        return len(self.target)

    def label(self, z: int) -> str:
        return self.class_labels[z] if self.class_labels else f"class {z}"


@dataclass(frozen=True, eq=False)
class EpisodeMetrics:
    """에피소드 집계: 효용 U, 방문 분포 D, 선호 위반 C, 특성 레벨별 커버리지"""
    U: float
    D: FeatureDistribution
    C: float
    coverage: Coverage = field(default_factory=dict)

    def __post_init__(self):
        if self.C < 0:
            raise MetricsError(f"divergence must be >= 0, got {self.C}")

    def coverage_of(self, dimension: str, level: str) -> float:
        try:
            return self.coverage[dimension][level]
        except KeyError as e:
            raise MetricsError(f"no coverage for {dimension}={level}") from e
