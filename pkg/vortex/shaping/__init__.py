"""스칼라화 기반 reward shaping"""

from vortex.shaping.models import GradientEstimate, ScalarizationConfig, ShapingReward
from vortex.shaping.scalarization import (
    analytic_shaping,
    damped_gradient,
    divergence_gradient,
    divergence_partial,
    gradient_estimate,
    mean_visitation,
    sa_update,
    scalarized_objective,
    step_size,
)

__all__ = [
    "GradientEstimate", "ScalarizationConfig", "ShapingReward",
    "analytic_shaping", "damped_gradient", "divergence_gradient", "divergence_partial",
    "gradient_estimate", "mean_visitation", "sa_update", "scalarized_objective", "step_size",
]
