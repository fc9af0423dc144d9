"""스칼라화/shaping 공식 테스트"""

import math

import numpy as np
import pytest

from vortex.errors import ShapingError
from vortex.metrics.divergence import EPSILON, divergence
from vortex.metrics.models import EpisodeMetrics, FeatureDistribution, PreferenceSpec
from vortex.shaping.models import GradientEstimate, ScalarizationConfig, ShapingReward
from vortex.shaping.scalarization import (
    analytic_shaping,
    damped_gradient,
    divergence_partial,
    gradient_estimate,
    mean_visitation,
    sa_update,
    scalarized_objective,
    step_size,
)


def _pref(target, kind="kl"):
    return PreferenceSpec("test", FeatureDistribution(np.asarray(target)), kind=kind)


def _random_simplex(rng, n, floor=0.01):
    x = rng.uniform(floor, 1.0, size=n)
    return x / x.sum()


def test_scalarized_objective():
    assert scalarized_objective(10.0, 0.5, 0.5) == pytest.approx(4.75)
    assert scalarized_objective(10.0, 0.5, 0.5, utility_scale=10.0) == pytest.approx(0.25)
    assert scalarized_objective(3.0, 2.0, 1.0) == 3.0
    with pytest.raises(ShapingError):
        scalarized_objective(1.0, 1.0, 1.5)


def test_config_validation():
    with pytest.raises(ShapingError, match="lambda"):
        ScalarizationConfig(lam=-0.1, B=1, T=1)
    with pytest.raises(ShapingError, match="eta0"):
        ScalarizationConfig(lam=0.5, B=1, T=1, eta0=-1.0)
    with pytest.raises(ShapingError, match="R_max"):
        ScalarizationConfig(lam=0.5, B=1, T=1, R_max=0.0)
    with pytest.raises(ShapingError, match="smoothing"):
        ScalarizationConfig(lam=0.5, B=1, T=1, smoothing=1.0)
    assert ScalarizationConfig(lam=0.5, B=4, T=5).pulls == 20
    assert ScalarizationConfig(lam=0.5, B=4, T=5, utility_scale=10.0).pull_ratio == 2.0


@pytest.mark.parametrize("kind", ["kl", "tv"])
def test_divergence_partial_matches_finite_differences(kind):
    rng = np.random.default_rng(99 if kind == "kl" else 100)
    h = 1e-6
    checked = 0
    while checked < 100:
        n = int(rng.integers(2, 6))
        d = _random_simplex(rng, n)
        t = _random_simplex(rng, n)
        # TV 는 꺾이는 점 근처 제외
        if kind == "tv" and np.min(np.abs(d - t)) < 10 * h:
            continue
        pref = _pref(t, kind)
        for z in range(n):
            up, down = d.copy(), d.copy()
            up[z] += h
            down[z] -= h
            numeric = (divergence(up, pref) - divergence(down, pref)) / (2 * h)
            analytic = divergence_partial(d, pref, z)
            assert analytic == pytest.approx(numeric, abs=1e-6)
        checked += 1


def test_kl_partial_at_target_matches_finite_differences():
    pref = _pref([0.5, 0.3, 0.2])
    h = 1e-5
    for z in range(3):
        up, down = pref.target.d.copy(), pref.target.d.copy()
        up[z] += h
        down[z] -= h
        numeric = (divergence(up, pref) - divergence(down, pref)) / (2 * h)
        assert numeric == pytest.approx(divergence_partial(pref.target, pref, z), abs=1e-6)
        assert numeric == pytest.approx(1.0, abs=1e-6)


def test_divergence_partial_invalid_class():
    with pytest.raises(ShapingError, match="invalid class index"):
        divergence_partial([0.5, 0.5], _pref([0.5, 0.5]), 2)


def test_analytic_shaping_formula():
    pref = _pref([0.75, 0.25])
    cfg = ScalarizationConfig(lam=0.5, B=2, T=5, R_max=10.0)
    D = np.array([0.5, 0.5])
    fp = np.log((D + EPSILON) / (pref.target.d + EPSILON)) + 1.0
    expected = -(0.5 / (0.5 * 10)) * fp
    np.testing.assert_allclose(analytic_shaping(D, pref, cfg).r, expected)
    # 목표보다 덜 받은 클래스 0 이 더 큰 보상
    r = analytic_shaping(D, pref, cfg).r
    assert r[0] > r[1]


def test_analytic_shaping_clamps():
    pref = _pref([0.99, 0.01])
    cfg = ScalarizationConfig(lam=0.1, B=1, T=1, R_max=0.5)
    r = analytic_shaping([0.01, 0.99], pref, cfg).r
    assert np.all(np.abs(r) <= 0.5)
    assert r.tolist() == [0.5, -0.5]


def test_analytic_shaping_lambda_edges():
    pref = _pref([0.5, 0.5])
    with pytest.raises(ShapingError, match="lambda=0"):
        analytic_shaping([0.5, 0.5], pref, ScalarizationConfig(lam=0.0, B=1, T=1))
    zeros = analytic_shaping([0.9, 0.1], pref, ScalarizationConfig(lam=1.0, B=1, T=1))
    assert zeros == ShapingReward.zeros(2)


def test_gradient_estimate_terms():
    pref = _pref([0.5, 0.5], kind="tv")
    cfg = ScalarizationConfig(lam=0.25, B=2, T=3, utility_scale=6.0)
    m = EpisodeMetrics(U=3.0, D=FeatureDistribution([0.75, 0.25]), C=0.25)
    g = gradient_estimate(m, pref, cfg)
    # λ (BT/scale) D - (1-λ) ½ sign(D - t)
    np.testing.assert_allclose(g.g, [0.25 * 0.75 - 0.75 * 0.5, 0.25 * 0.25 + 0.75 * 0.5])
    np.testing.assert_allclose(g.centered().g.sum(), 0.0, atol=1e-15)


def test_mean_visitation():
    history = [
        EpisodeMetrics(U=0.0, D=FeatureDistribution([1.0, 0.0]), C=0.0),
        EpisodeMetrics(U=0.0, D=FeatureDistribution([0.5, 0.5]), C=0.0),
    ]
    np.testing.assert_allclose(mean_visitation(history), [0.75, 0.25])
    with pytest.raises(ShapingError, match="at least one"):
        mean_visitation([])


def test_damped_gradient_terms():
    pref = _pref([0.5, 0.5], kind="tv")
    cfg = ScalarizationConfig(lam=0.25, B=2, T=3, utility_scale=3.0, smoothing=0.5)
    R = ShapingReward.from_values([0.1, -0.2])
    g = damped_gradient([0.75, 0.25], R, pref, cfg)
    # m = (0.625, 0.375), κ = 2: -λκR - (1-λ) ½ sign(m - t)
    np.testing.assert_allclose(g.g, [-0.05 - 0.375, 0.1 + 0.375])
    with pytest.raises(ShapingError, match="shaping has 2"):
        damped_gradient([0.5, 0.25, 0.25], R, _pref([0.4, 0.3, 0.3]), cfg)


def test_damped_gradient_vanishes_at_analytic_shaping():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        d, t = _random_simplex(rng, n), _random_simplex(rng, n)
        pref = _pref(t)
        cfg = ScalarizationConfig(
            lam=float(rng.uniform(0.1, 0.9)), B=2, T=5, R_max=1e6, utility_scale=10.0,
            smoothing=0.2,
        )
        R = analytic_shaping((1.0 - 0.2) * d + 0.2 * t, pref, cfg)
        np.testing.assert_allclose(damped_gradient(d, R, pref, cfg).g, 0.0, atol=1e-9)


def test_damped_gradient_on_target_is_uniform():
    pref = _pref([0.6, 0.3, 0.1])
    cfg = ScalarizationConfig(lam=0.5, B=1, T=1, smoothing=0.15)
    g = damped_gradient(pref.target, ShapingReward.zeros(3), pref, cfg)
    np.testing.assert_allclose(g.g, [-0.5, -0.5, -0.5])
    np.testing.assert_allclose(g.centered().g, 0.0, atol=1e-12)


def test_damped_gradient_lambda_one_is_zero_at_zero_shaping():
    pref = _pref([0.9, 0.1])
    cfg = ScalarizationConfig(lam=1.0, B=3, T=4, smoothing=0.15)
    g = damped_gradient([0.1, 0.9], ShapingReward.zeros(2), pref, cfg)
    assert g.g.tolist() == [0.0, 0.0]


def test_step_size_schedule():
    assert step_size(1, 0.5) == 0.5
    assert step_size(4, 0.5) == 0.125
    with pytest.raises(ShapingError):
        step_size(0, 0.5)


def test_sa_update_steps_and_clips():
    cfg = ScalarizationConfig(lam=0.5, B=1, T=1, eta0=1.0, R_max=1.0)
    R = ShapingReward.from_values([0.5, -0.5])
    nxt = sa_update(R, GradientEstimate([2.0, -0.2]), 2, cfg)
    np.testing.assert_allclose(nxt.r, [1.0, -0.6])
    with pytest.raises(ShapingError, match="gradient has 3"):
        sa_update(R, GradientEstimate([0.0, 0.0, 0.0]), 1, cfg)


def test_shaping_reward_is_read_only_and_finite():
    r = ShapingReward.from_values([0.1, 0.2])
    with pytest.raises(ValueError):
        r.r[0] = 1.0
    with pytest.raises(ShapingError):
        ShapingReward.from_values([math.inf])
    assert r.max_abs_change(ShapingReward.from_values([0.1, 0.5])) == pytest.approx(0.3)
