"""해석적 shaper 백엔드

sa 모드: R^0 = 0, 이후 지표 이력으로 기울기를 추정하고 확률적 근사로 갱신
closed_form 모드: R^k = analytic_shaping(D_{k-1})

sa 모드의 추정기
    damped: 지금까지의 평균 방문 분포와 현재 R 로 만든 감쇠 기울기 (기본)
    visitation: 직전 에피소드의 방문 분포만 쓰는 기울기
"""

from __future__ import annotations

import logging
from typing import Literal, Optional

from vortex.errors import ProposalError, ShapingError
from vortex.shaper.base import ShaperBackend, ShaperContext, ShaperOutput
from vortex.shaping.models import GradientEstimate, ScalarizationConfig, ShapingReward
from vortex.shaping.scalarization import (
    analytic_shaping,
    damped_gradient,
    gradient_estimate,
    mean_visitation,
    sa_update,
    step_size,
)

logger = logging.getLogger(__name__)

AnalyticMode = Literal["sa", "closed_form"]
GradientEstimator = Literal["damped", "visitation"]


class AnalyticShaper(ShaperBackend):
    """스칼라화 기반 해석적 shaper

    상태를 두지 않으며 같은 지표 이력에는 항상 같은 제안을 돌려줍니다.
    """

    name = "analytic"

    def __init__(
        self,
        config: ScalarizationConfig,
        mode: AnalyticMode = "sa",
        center_gradient: bool = True,
        estimator: GradientEstimator = "damped",
    ):
        """
        Args:
            config: λ, B, T, eta0, R_max, utility_scale, smoothing
            mode: "sa" (확률적 근사) 또는 "closed_form"
            center_gradient: 기울기의 클래스 공통 성분 제거 여부
            estimator: sa 모드의 기울기 추정기
        """
        if mode not in ("sa", "closed_form"):
            raise ValueError(f"Unknown analytic mode: {mode}")
        if estimator not in ("damped", "visitation"):
            raise ValueError(f"Unknown gradient estimator: {estimator}")
        self.config = config
        self.mode = mode
        self.center_gradient = center_gradient
        self.estimator = estimator

    def propose(self, ctx: ShaperContext) -> ShaperOutput:
        try:
            if self.mode == "closed_form":
                return self._propose_closed_form(ctx)
            return self._propose_sa(ctx)
        except ShapingError as e:
            raise ProposalError(f"analytic shaper failed at episode {ctx.k}: {e}") from e

    def _propose_closed_form(self, ctx: ShaperContext) -> ShaperOutput:
        if ctx.k == 0:
            return ShaperOutput(ShapingReward.zeros(ctx.n_classes), backend=self.name)
        D_prev = ctx.metrics_history[-1].D
        shaping = analytic_shaping(D_prev, ctx.pref, self.config)
        return ShaperOutput(
            shaping,
            backend=self.name,
            diagnostics={"mode": "closed_form", "lambda": self.config.lam},
        )

    def _gradient(self, ctx: ShaperContext, k: int, R: ShapingReward) -> GradientEstimate:
        """k 번째 갱신의 기울기 (에피소드 0..k-1 의 지표 사용)"""
        if self.estimator == "visitation":
            g = gradient_estimate(ctx.metrics_history[k - 1], ctx.pref, self.config)
        else:
            D_bar = mean_visitation(ctx.metrics_history[:k])
            g = damped_gradient(D_bar, R, ctx.pref, self.config)
        return g.centered() if self.center_gradient else g

    def _propose_sa(self, ctx: ShaperContext) -> ShaperOutput:
        # 지표 이력 전체를 R^0 = 0 부터 다시 접음
        R = ShapingReward.zeros(ctx.n_classes)
        g: Optional[GradientEstimate] = None
        for k in range(1, ctx.k + 1):
            g = self._gradient(ctx, k, R)
            R = sa_update(R, g, k, self.config)

        diagnostics = {"mode": "sa", "estimator": self.estimator, "lambda": self.config.lam}
        if g is not None:
            diagnostics["gradient"] = [float(v) for v in g.g]
            diagnostics["step_size"] = step_size(ctx.k, self.config.eta0)
            logger.debug(
                "episode %d: step %.4g, gradient %s",
                ctx.k, diagnostics["step_size"], diagnostics["gradient"],
            )
        return ShaperOutput(R, backend=self.name, diagnostics=diagnostics)
