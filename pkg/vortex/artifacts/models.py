"""실행 기록 모델"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from vortex.feedback.models import Deltas, PromptState
from vortex.metrics.models import Coverage
from vortex.metrics.pareto import ParetoArchive


@dataclass(frozen=True)
class EpisodeRecord:
    """에피소드 k 의 기록

    wall_time 은 비교와 episodes.jsonl 직렬화에서 제외됩니다 (manifest.json 에 기록).
    """
    k: int
    shaping: List[float]
    U: float
    D: List[float]
    C: float
    coverage: Coverage
    seed: int
    deltas: Optional[Deltas] = None
    feedback: Optional[str] = None
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "shaping": list(self.shaping),
            "U": self.U,
            "D": list(self.D),
            "C": self.C,
            "coverage": {dim: dict(levels) for dim, levels in self.coverage.items()},
            "seed": self.seed,
            "deltas": self.deltas.to_dict() if self.deltas is not None else None,
            "feedback": self.feedback,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EpisodeRecord":
        deltas = data.get("deltas")
        return cls(
            k=int(data["k"]),
            shaping=[float(v) for v in data["shaping"]],
            U=float(data["U"]),
            D=[float(v) for v in data["D"]],
            C=float(data["C"]),
            coverage={d: {lv: float(v) for lv, v in levels.items()}
                      for d, levels in data["coverage"].items()},
            seed=int(data["seed"]),
            deltas=Deltas.from_dict(deltas) if deltas is not None else None,
            feedback=data.get("feedback"),
        )


@dataclass
class RunResult:
    """실행 결과: 에피소드 기록, 최종 프롬프트, 파레토 아카이브, manifest"""
    records: List[EpisodeRecord]
    prompt: PromptState
    archive: ParetoArchive
    manifest: Dict[str, Any] = field(default_factory=dict)
    stopped_early: bool = False
    error: Optional[str] = None

    @property
    def final(self) -> EpisodeRecord:
        return self.records[-1]
