"""shaper 백엔드 추상 클래스"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from vortex.errors import IncompleteOutputError, ShapingValidationError
from vortex.feedback.models import PromptState
from vortex.metrics.models import EpisodeMetrics, PreferenceSpec
from vortex.shaping.models import ShapingReward

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShaperContext:
    """에피소드 k 의 제안 입력

    metrics_history 는 에피소드 0..k-1 의 지표입니다.
    """
    prompt: PromptState
    metrics_history: Tuple[EpisodeMetrics, ...]
    pref: PreferenceSpec
    k: int
    env_summary: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.metrics_history) != self.k:
            raise ValueError(
                f"metrics_history has {len(self.metrics_history)} entries for episode {self.k}"
            )

    @property
    def n_classes(self) -> int:
        return self.pref.n_classes


@dataclass(frozen=True)
class ShaperOutput:
    """검증된 shaping 제안"""
    shaping: ShapingReward
    backend: str
    rationale: Optional[str] = None
    diagnostics: Dict[str, object] = field(default_factory=dict)


def validate_shaping_vector(
    values: Union[Sequence[float], Mapping[str, float]],
    n_classes: int,
    r_max: float,
    clamp: bool = False,
) -> ShapingReward:
    """shaping 벡터 검증

    Args:
        values: 클래스 순서 리스트 또는 {클래스 id 문자열: 값}
        n_classes: 클래스 수
        r_max: 허용 절댓값
        clamp: True 이면 범위 밖 값을 잘라내고 경고, False 이면 오류

    Raises:
        IncompleteOutputError: 누락된 클래스
        ShapingValidationError: 숫자가 아니거나 유한하지 않은 값, (clamp=False 일 때) 범위 밖 값
    """
    if isinstance(values, Mapping):
        missing = [z for z in range(n_classes) if str(z) not in values]
        if missing:
            raise IncompleteOutputError(f"shaping is missing classes {missing}")
        extra = sorted(set(values) - {str(z) for z in range(n_classes)})
        if extra:
            logger.warning("ignoring unknown shaping keys %s", extra)
        raw = [values[str(z)] for z in range(n_classes)]
    else:
        raw = list(values)
        if len(raw) < n_classes:
            raise IncompleteOutputError(
                f"shaping has {len(raw)} entries, "
                f"missing classes {list(range(len(raw), n_classes))}"
            )
        if len(raw) > n_classes:
            raise ShapingValidationError(f"shaping has {len(raw)} entries for {n_classes} classes")

    out = np.empty(n_classes)
    for z, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ShapingValidationError(f"class {z}: shaping value {v!r} is not a finite number")
        if abs(v) > r_max:
            if not clamp:
                raise ShapingValidationError(
                    f"class {z}: shaping value {v} outside [-{r_max}, {r_max}]"
                )
            clipped = float(np.clip(v, -r_max, r_max))
            logger.warning("class %d: shaping value %s clamped to %s", z, v, clipped)
            v = clipped
        out[z] = float(v)
    return ShapingReward(out)


class ShaperBackend(ABC):
    """reward shaper 백엔드 추상 클래스"""

    name: str = "base"

    @abstractmethod
    def propose(self, ctx: ShaperContext) -> ShaperOutput:
        """
        에피소드 k 의 shaping 보상 제안

        Args:
            ctx: 프롬프트, 지표 이력, 선호, 에피소드 번호

        Returns:
            검증된 shaping 제안

        Raises:
            ProposalError: 백엔드별 실패
        """
        pass
