"""지표 테스트: divergence, 방문 분포, 커버리지, 선호 지시문"""

import math

import numpy as np
import pytest

from vortex.errors import ConfigError, MetricsError, UndefinedDistributionError
from vortex.metrics.divergence import EPSILON, divergence, f_prime, kl_divergence, tv_distance
from vortex.metrics.evaluation import (
    coverage,
    evaluate_episode,
    feature_distribution,
    pull_counts,
    utility,
)
from vortex.metrics.models import EpisodeMetrics, FeatureDistribution, PreferenceSpec
from vortex.metrics.preference import compile_directive, parse_directive, preference_from_target
from vortex.rmab.simulator import rollout, spawn_stream


def _pref(target, kind="kl"):
    return PreferenceSpec("test", FeatureDistribution(np.asarray(target)), kind=kind)


def test_kl_of_identical_distributions_is_zero():
    d = FeatureDistribution([0.25, 0.25, 0.5])
    assert kl_divergence(d, d) == 0.0


def test_kl_known_value():
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2))


def test_kl_finite_with_empty_target_class():
    value = kl_divergence([0.5, 0.5], [1.0, 0.0])
    assert math.isfinite(value)
    expected = 0.5 * math.log(0.5) + 0.5 * math.log(0.5 / EPSILON)
    assert value == pytest.approx(expected, rel=1e-6)


def test_tv_distance():
    assert tv_distance([1.0, 0.0], [0.5, 0.5]) == pytest.approx(0.5)
    assert tv_distance([0.2, 0.8], [0.2, 0.8]) == 0.0


def test_dimension_mismatch():
    with pytest.raises(MetricsError, match="dimension mismatch"):
        divergence([0.5, 0.5], _pref([0.2, 0.3, 0.5]))


def test_f_prime_forms():
    d, t = np.array([0.6, 0.4]), np.array([0.5, 0.5])
    np.testing.assert_allclose(
        f_prime(d, t, "kl"), np.log((d + EPSILON) / (t + EPSILON)) + 1.0
    )
    assert f_prime(d, t, "tv").tolist() == [0.5, -0.5]
    assert f_prime(t, t, "tv").tolist() == [0.0, 0.0]
    with pytest.raises(MetricsError):
        f_prime(d, t, "hellinger")


@pytest.mark.parametrize(
    "values",
    [[0.5, 0.4], [-0.1, 1.1], [float("nan"), 1.0], []],
)
def test_invalid_distributions(values):
    with pytest.raises(MetricsError):
        FeatureDistribution(values)


def test_distribution_from_zero_counts():
    with pytest.raises(UndefinedDistributionError):
        FeatureDistribution.from_counts([0, 0])


def test_preference_kind_validation():
    with pytest.raises(MetricsError, match="Unknown divergence kind"):
        _pref([0.5, 0.5], kind="js")


def test_negative_divergence_rejected():
    with pytest.raises(MetricsError):
        EpisodeMetrics(U=1.0, D=FeatureDistribution([1.0]), C=-0.1)


def test_episode_metrics_on_deterministic_rollout(det_env, half_pref):
    traj = rollout(det_env, lambda pop: [0] if pop.round == 0 else [1], spawn_stream(0))
    assert utility(traj) == pytest.approx(1.4)
    assert pull_counts(traj, det_env).tolist() == [1, 1]
    assert feature_distribution(traj, det_env).as_list() == [0.5, 0.5]
    assert coverage(traj, det_env) == {"group": {"A": 0.5, "B": 0.5}}

    m = evaluate_episode(traj, det_env, half_pref)
    assert m.C == 0.0
    assert m.coverage_of("group", "A") == 0.5
    with pytest.raises(MetricsError):
        m.coverage_of("income", "Low")


def test_no_pulls_is_undefined(det_env, half_pref):
    traj = rollout(det_env, lambda pop: [], spawn_stream(0))
    with pytest.raises(UndefinedDistributionError):
        evaluate_episode(traj, det_env, half_pref)


def test_feature_distribution_is_normalized(stochastic_env):
    traj = rollout(stochastic_env, lambda pop: [0, 3], spawn_stream(1))
    d = feature_distribution(traj, stochastic_env)
    assert d.d.sum() == pytest.approx(1.0, abs=1e-12)
    for levels in coverage(traj, stochastic_env).values():
        assert sum(levels.values()) == pytest.approx(1.0, abs=1e-12)


def test_parse_directive_forms(armman_pref):
    env, _ = armman_pref
    assert parse_directive("favor LI", env) == ("income", "Low")
    assert parse_directive("Favour income=low", env) == ("income", "Low")
    assert parse_directive("EDUCATION = High", env) == ("education", "High")
    assert parse_directive("old", env) == ("age", "Old")
    with pytest.raises(ConfigError, match="unknown feature dimension"):
        parse_directive("favor caste=Low", env)
    with pytest.raises(ConfigError, match="unknown level"):
        parse_directive("income=Middle", env)
    with pytest.raises(ConfigError, match="cannot parse directive"):
        parse_directive("more fairness", env)
    with pytest.raises(ConfigError, match="empty"):
        parse_directive("favor ", env)


def test_compile_directive_splits_mass_by_population(armman_pref):
    env, pref = armman_pref
    assert pref.focus == ("income", "Low")
    assert pref.rho == 0.75
    low = [fc.level_of("income") == "Low" for fc in env.classes]
    target = pref.target.d
    assert target[low].sum() == pytest.approx(0.75)
    np.testing.assert_allclose(target[low], 0.75 / 4)
    np.testing.assert_allclose(target[~np.array(low)], 0.25 / 4)
    assert pref.label(0) == env.classes[0].name


def test_compile_directive_rejects_bad_rho(armman_pref):
    env, _ = armman_pref
    with pytest.raises(ConfigError, match="rho"):
        compile_directive("LI", env, rho=1.5)


def test_preference_from_target_length(det_env):
    with pytest.raises(ConfigError, match="target has 3 entries"):
        preference_from_target([0.2, 0.3, 0.5], det_env)
