"""f-divergence (KL, TV)

KL 은 분자/분모 모두에 EPSILON 을 더해 빈 클래스에서도 유한합니다.
shaping 의 편미분도 같은 EPSILON 을 씁니다.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from vortex.errors import MetricsError
from vortex.metrics.models import DivergenceKind, FeatureDistribution, PreferenceSpec
from vortex.rmab.models import FloatArray

EPSILON = 1e-9

DistributionLike = Union[FeatureDistribution, FloatArray]


def as_array(d: DistributionLike) -> FloatArray:
    if isinstance(d, FeatureDistribution):
        return d.d
    return np.asarray(d, dtype=np.float64).reshape(-1)


def _check_dims(d: FloatArray, target: FloatArray) -> None:
    if d.shape != target.shape:
        raise MetricsError(
            f"dimension mismatch: distribution has {d.shape[0]} classes, "
            f"target has {target.shape[0]}"
        )


def kl_divergence(d: DistributionLike, target: DistributionLike) -> float:
    """sum_z d(z) ln((d(z)+ε) / (t(z)+ε))"""
    d, t = as_array(d), as_array(target)
    _check_dims(d, t)
    value = float(np.sum(d * np.log((d + EPSILON) / (t + EPSILON))))
    # 정규화된 분포에서만 ε 평활화로 생기는 음의 반올림 오차 제거
    if abs(float(d.sum()) - 1.0) <= 1e-9 and abs(float(t.sum()) - 1.0) <= 1e-9:
        return max(value, 0.0)
    return value


def tv_distance(d: DistributionLike, target: DistributionLike) -> float:
    """½ sum_z |d(z) - t(z)|"""
    d, t = as_array(d), as_array(target)
    _check_dims(d, t)
    return float(0.5 * np.sum(np.abs(d - t)))


def divergence(d: DistributionLike, pref: PreferenceSpec) -> float:
    """선호 위반 C = Div(d || target)

    d 는 정규화되지 않은 배열도 받습니다 (유한 차분 검사용).
    """
    if pref.kind == "kl":
        return kl_divergence(d, pref.target)
    if pref.kind == "tv":
        return tv_distance(d, pref.target)
    raise MetricsError(f"Unknown divergence kind: {pref.kind}")


def f_prime(d: DistributionLike, target: DistributionLike, kind: DivergenceKind) -> FloatArray:
    """클래스별 f'(D(z)/target(z))

    KL: ln((d+ε)/(t+ε)) + 1
    TV: ½ sign(d - t), d = t 에서 0
    """
    d, t = as_array(d), as_array(target)
    _check_dims(d, t)
    if kind == "kl":
        return np.log((d + EPSILON) / (t + EPSILON)) + 1.0
    if kind == "tv":
        return 0.5 * np.sign(d - t)
    raise MetricsError(f"Unknown divergence kind: {kind}")
