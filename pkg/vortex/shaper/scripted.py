"""스크립트 재생 shaper 백엔드

스크립트 파일 형식:
    - JSON 배열: [[0.0, 0.1, ...], {"0": 0.0, "1": 0.1, ...}, ...]
    - episodes.jsonl: 기록된 실행의 에피소드별 "shaping" 을 순서대로 재생
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Mapping, Sequence, Union

from vortex.errors import ConfigError, ScriptExhaustedError
from vortex.shaper.base import ShaperBackend, ShaperContext, ShaperOutput, validate_shaping_vector

logger = logging.getLogger(__name__)

ScriptEntry = Union[Sequence[float], Mapping[str, float]]


class ScriptedShaper(ShaperBackend):
    """미리 정한 shaping 벡터를 에피소드 순서대로 반환"""

    name = "scripted"

    def __init__(self, vectors: Sequence[ScriptEntry], r_max: float = 1.0):
        self.vectors: List[ScriptEntry] = list(vectors)
        self.r_max = r_max

    @classmethod
    def from_file(cls, path: Union[str, Path], r_max: float = 1.0) -> "ScriptedShaper":
        """JSON 배열 또는 episodes.jsonl 로부터 생성"""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read shaping script {path}: {e}") from e

        try:
            if path.suffix == ".jsonl":
                vectors = [
                    json.loads(line)["shaping"] for line in text.splitlines() if line.strip()
                ]
            else:
                vectors = json.loads(text)
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ConfigError(f"malformed shaping script {path}: {e}") from e

        if not isinstance(vectors, list):
            raise ConfigError(f"shaping script {path} must hold a JSON array of vectors")
        logger.info("loaded %d scripted shaping vectors from %s", len(vectors), path)
        return cls(vectors, r_max=r_max)

    def propose(self, ctx: ShaperContext) -> ShaperOutput:
        if ctx.k >= len(self.vectors):
            raise ScriptExhaustedError(
                f"script has {len(self.vectors)} vectors, episode {ctx.k} requested"
            )
        shaping = validate_shaping_vector(
            self.vectors[ctx.k], ctx.n_classes, self.r_max, clamp=False
        )
        return ShaperOutput(shaping, backend=self.name)
