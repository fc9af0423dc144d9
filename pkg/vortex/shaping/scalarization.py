"""스칼라화 → reward shaping

    J_λ = λ U/scale - (1-λ) C
    R_h(z) = -(1-λ) scale / (λ B T) * f'(D(z)/target(z))          (해석적 shaping)
    g(z) = λ (B T / scale) D(z) - (1-λ) f'(D(z)/target(z))         (방문 기울기 추정)
    g(z) = -λ (B T / scale) R(z) - (1-λ) f'(m(z)/target(z))        (감쇠 기울기 추정)
    R^{k+1} = clip(R^k + (eta0/k) g^k, -R_max, R_max)              (확률적 근사 갱신)

scale 은 ScalarizationConfig.utility_scale 이며 1.0 이면 원식과 같습니다.
m = (1-β) D̄ + β target 이고 D̄ 는 지금까지 끝난 에피소드의 평균 방문 분포입니다.
감쇠 추정의 고정점은 analytic_shaping(m) 이며 λ = 1 이면 R 은 0 에 머뭅니다.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from vortex.errors import ShapingError
from vortex.metrics.divergence import DistributionLike, as_array, f_prime
from vortex.metrics.models import EpisodeMetrics, PreferenceSpec
from vortex.rmab.models import FloatArray
from vortex.shaping.models import GradientEstimate, ScalarizationConfig, ShapingReward


def scalarized_objective(U: float, C: float, lam: float, utility_scale: float = 1.0) -> float:
    """J_λ = λ U/scale - (1-λ) C"""
    if not (0.0 <= lam <= 1.0):
        raise ShapingError(f"lambda must lie in [0, 1], got {lam}")
    return lam * U / utility_scale - (1.0 - lam) * C


def divergence_gradient(D_pi: DistributionLike, pref: PreferenceSpec) -> FloatArray:
    """모든 클래스에 대한 ∂Div/∂D(z)"""
    return f_prime(D_pi, pref.target, pref.kind)


def divergence_partial(D_pi: DistributionLike, pref: PreferenceSpec, z: int) -> float:
    """∂Div(D || target)/∂D(z) = f'(D(z)/target(z))"""
    n = as_array(D_pi).shape[0]
    if not (0 <= z < n):
        raise ShapingError(f"invalid class index {z} for {n} classes")
    return float(divergence_gradient(D_pi, pref)[z])


def _clip(values: FloatArray, r_max: float) -> ShapingReward:
    return ShapingReward(np.clip(values, -r_max, r_max))


def analytic_shaping(
    D_pi: DistributionLike,
    pref: PreferenceSpec,
    cfg: ScalarizationConfig,
) -> ShapingReward:
    """현재 방문 분포에서의 해석적 shaping 보상 (R_max 로 clamp)

    Raises:
        ShapingError: λ = 0
    """
    if cfg.lam == 0.0:
        raise ShapingError("analytic shaping is undefined at lambda=0; use a small positive lambda")
    if cfg.lam == 1.0:
        return ShapingReward.zeros(as_array(D_pi).shape[0])
    coef = -(1.0 - cfg.lam) * cfg.utility_scale / (cfg.lam * cfg.pulls)
    return _clip(coef * divergence_gradient(D_pi, pref), cfg.R_max)


def gradient_estimate(
    metrics: EpisodeMetrics,
    pref: PreferenceSpec,
    cfg: ScalarizationConfig,
) -> GradientEstimate:
    """방문 항 λ(BT/scale)D 와 선호 항 -(1-λ)f' 의 합"""
    d = metrics.D.d
    visitation = cfg.lam * cfg.pull_ratio * d
    preference = (1.0 - cfg.lam) * divergence_gradient(metrics.D, pref)
    return GradientEstimate(visitation - preference)


def mean_visitation(history: Sequence[EpisodeMetrics]) -> FloatArray:
    """에피소드 이력의 평균 방문 분포 D̄"""
    if not history:
        raise ShapingError("mean visitation needs at least one episode")
    return np.mean(np.stack([m.D.d for m in history]), axis=0)


def damped_gradient(
    D_bar: DistributionLike,
    R_h: ShapingReward,
    pref: PreferenceSpec,
    cfg: ScalarizationConfig,
) -> GradientEstimate:
    """복원 항 -λκR 과 평활화한 선호 항 -(1-λ)f'(m) 의 합

    m = (1 - smoothing) D̄ + smoothing * target
    """
    d = as_array(D_bar)
    if len(R_h) != d.shape[0]:
        raise ShapingError(f"shaping has {len(R_h)} classes, distribution has {d.shape[0]}")
    mixed = (1.0 - cfg.smoothing) * d + cfg.smoothing * pref.target.d
    restoring = cfg.lam * cfg.pull_ratio * R_h.r
    preference = (1.0 - cfg.lam) * divergence_gradient(mixed, pref)
    return GradientEstimate(-restoring - preference)


def step_size(k: int, eta0: float) -> float:
    """η_k = eta0 / k"""
    if k < 1:
        raise ShapingError(f"step index must be >= 1, got {k}")
    return eta0 / k


def sa_update(
    R_h: ShapingReward,
    g: GradientEstimate,
    k: int,
    cfg: ScalarizationConfig,
) -> ShapingReward:
    """R^{k+1} = clip(R^k + η_k g^k)"""
    if len(R_h) != g.g.shape[0]:
        raise ShapingError(f"shaping has {len(R_h)} classes, gradient has {g.g.shape[0]}")
    return _clip(R_h.r + step_size(k, cfg.eta0) * g.g, cfg.R_max)
