"""효용, 방문 분포, divergence, 커버리지, 파레토 지표"""

from vortex.metrics.divergence import EPSILON, divergence, f_prime, kl_divergence, tv_distance
from vortex.metrics.evaluation import (
    coverage,
    evaluate_episode,
    feature_distribution,
    pull_counts,
    utility,
)
from vortex.metrics.models import EpisodeMetrics, FeatureDistribution, PreferenceSpec
from vortex.metrics.pareto import ParetoArchive, ParetoPoint, dominates, pareto_filter
from vortex.metrics.preference import compile_directive, parse_directive, preference_from_target

__all__ = [
    "EPSILON", "divergence", "f_prime", "kl_divergence", "tv_distance",
    "coverage", "evaluate_episode", "feature_distribution", "pull_counts", "utility",
    "EpisodeMetrics", "FeatureDistribution", "PreferenceSpec",
    "ParetoArchive", "ParetoPoint", "dominates", "pareto_filter",
    "compile_directive", "parse_directive", "preference_from_target",
]
