"""궤적 → 에피소드 지표"""

from __future__ import annotations

import numpy as np

from vortex.metrics.divergence import divergence
from vortex.metrics.models import Coverage, EpisodeMetrics, FeatureDistribution, PreferenceSpec
from vortex.rmab.models import Environment, IntArray, Trajectory


def utility(traj: Trajectory) -> float:
    """실현된 기본 보상의 합 (shaping 제외)"""
    return float(sum(float(r.base_rewards.sum()) for r in traj.records))


def pull_counts(traj: Trajectory, env: Environment) -> IntArray:
    """특성 클래스별 pull 수"""
    counts = np.zeros(env.n_classes, dtype=np.int64)
    for record in traj.records:
        if record.actions:
            counts += np.bincount(env.arm_class_of[list(record.actions)], minlength=env.n_classes)
    return counts


def feature_distribution(traj: Trajectory, env: Environment) -> FeatureDistribution:
    """d(z) = (클래스 z 의 pull 수) / (전체 pull 수)

    Raises:
        UndefinedDistributionError: pull 이 한 번도 없음
    """
    return FeatureDistribution.from_counts(pull_counts(traj, env))


def coverage_from_distribution(d: FeatureDistribution, env: Environment) -> Coverage:
    """클래스 분포를 차원/레벨별 비율로 합산"""
    result: Coverage = {}
    for dim in env.features:
        levels = {level: 0.0 for level in dim.levels}
        for fc, share in zip(env.classes, d.d):
            levels[fc.level_of(dim.name)] += float(share)
        result[dim.name] = levels
    return result


def coverage(traj: Trajectory, env: Environment) -> Coverage:
    """특성 차원/레벨별 pull 비율 (차원마다 합 1)"""
    return coverage_from_distribution(feature_distribution(traj, env), env)


def evaluate_episode(traj: Trajectory, env: Environment, pref: PreferenceSpec) -> EpisodeMetrics:
    """에피소드 지표 U, D, C, coverage 계산"""
    d = feature_distribution(traj, env)
    return EpisodeMetrics(
        U=utility(traj),
        D=d,
        C=divergence(d, pref),
        coverage=coverage_from_distribution(d, env),
    )
