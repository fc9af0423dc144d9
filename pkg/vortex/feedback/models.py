"""피드백 데이터 모델"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from vortex.metrics.models import Coverage


@dataclass(frozen=True)
class Deltas:
    """두 에피소드 사이의 변화량

    dD 는 두 분포의 차이이므로 합이 0 입니다.
    """
    dU: float
    dD: Tuple[float, ...]
    dC: float
    dCoverage: Coverage = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "dU": self.dU,
            "dD": list(self.dD),
            "dC": self.dC,
            "dCoverage": {dim: dict(levels) for dim, levels in self.dCoverage.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Deltas":
        return cls(
            dU=float(data["dU"]),
            dD=tuple(float(v) for v in data["dD"]),
            dC=float(data["dC"]),
            dCoverage={d: {lv: float(v) for lv, v in levels.items()}
                       for d, levels in data.get("dCoverage", {}).items()},
        )


@dataclass(frozen=True)
class VerbalFeedback:
    """언어 피드백: 렌더링된 문장 + 구조화된 내용"""
    text: str
    deltas: Deltas
    increase: Tuple[int, ...] = ()
    decrease: Tuple[int, ...] = ()


@dataclass(frozen=True)
class PromptState:
    """고정 블록 + 누적 피드백 블록

    렌더링 순서는 fixed, Reflection(editable), closing 입니다.
    fixed 와 closing 은 실행 내내 바뀌지 않고 editable 은 뒤에만 추가됩니다.
    """
    fixed: str
    editable: Tuple[str, ...] = ()
    closing: str = ""

    @property
    def rounds(self) -> int:
        return len(self.editable)

    def entries(self) -> List[str]:
        return list(self.editable)
