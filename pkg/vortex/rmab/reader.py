"""환경 명세 리더

환경 명세 JSON 문서를 읽어 검증된 Environment 로 변환합니다.
확률 행이 1 에서 벗어나면 재정규화하지 않고 오류를 냅니다.
"""

from __future__ import annotations

import json
import logging
import math
from importlib import resources
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from vortex.errors import EnvironmentSpecError
from vortex.rmab.models import (
    ArmType,
    Environment,
    FeatureClass,
    FeatureDimension,
    TransitionKernel,
)

logger = logging.getLogger(__name__)

# 행 합 허용 오차
ROW_SUM_TOLERANCE = 1e-9

# transitions 키 → (s, a)
TRANSITION_KEYS: Dict[str, Tuple[int, int]] = {
    "s0_a0": (0, 0),
    "s0_a1": (0, 1),
    "s1_a0": (1, 0),
    "s1_a1": (1, 1),
}

BUNDLED_SPECS = ("armman", "conservation")


# ============================================================
# 명세 파일 스키마 (pydantic)
# ============================================================

class FeatureSchema(BaseModel):
    """특성 차원"""
    model_config = ConfigDict(extra="forbid")

    name: str
    levels: List[str] = Field(min_length=1)


class TypeSchema(BaseModel):
    """arm 타입"""
    model_config = ConfigDict(extra="forbid")

    id: int
    features: Dict[str, str]
    count: int = Field(ge=1)
    base_reward: Dict[str, float]
    transitions: Dict[str, List[float]]
    initial_state: int = 0


class EnvironmentSchema(BaseModel):
    """환경 명세 문서"""
    model_config = ConfigDict(extra="forbid")

    name: str
    N: int = Field(ge=1)
    B: int = Field(ge=1)
    T: int = Field(ge=1)
    features: List[FeatureSchema]
    types: List[TypeSchema] = Field(min_length=1)
    aliases: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    description: str = ""

    @field_validator("features")
    @classmethod
    def _unique_feature_names(cls, features: List[FeatureSchema]) -> List[FeatureSchema]:
        names = [f.name for f in features]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate feature names: {names}")
        return features


# ============================================================
# 로더
# ============================================================

def load_environment(spec_text: str) -> Environment:
    """환경 명세 JSON 문자열을 Environment 로 변환

    Args:
        spec_text: 환경 명세 문서

    Returns:
        검증된 Environment

    Raises:
        EnvironmentSpecError: 문서 형식 오류, 행 합 오류, 잘못된 인덱스, B > N
    """
    try:
        schema = EnvironmentSchema.model_validate_json(spec_text)
    except ValidationError as e:
        raise EnvironmentSpecError(f"malformed environment spec: {e}") from e

    env = _build_environment(schema)
    logger.info(
        "loaded environment %s: N=%d, B=%d, T=%d, %d types",
        env.name, env.N, env.B, env.T, len(env.types),
    )
    return env


def load_environment_file(path: Union[str, Path]) -> Environment:
    """파일 경로에서 환경 명세 로드"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise EnvironmentSpecError(f"cannot read environment spec {path}: {e}") from e
    return load_environment(text)


def load_bundled_environment(name: str) -> Environment:
    """패키지에 포함된 환경 명세 로드 (armman, conservation)"""
    if name not in BUNDLED_SPECS:
        raise EnvironmentSpecError(
            f"unknown bundled environment {name!r}; choose from {', '.join(BUNDLED_SPECS)}"
        )
    text = resources.files("vortex.rmab").joinpath("specs", f"{name}.json").read_text("utf-8")
    return load_environment(text)


def resolve_environment(ref: Union[str, Path]) -> Environment:
    """번들 이름 또는 파일 경로로 환경 로드"""
    if isinstance(ref, str) and ref in BUNDLED_SPECS:
        return load_bundled_environment(ref)
    return load_environment_file(ref)


def _build_environment(schema: EnvironmentSchema) -> Environment:
    """스키마 → Environment 변환 및 검증"""
    if schema.B > schema.N:
        raise EnvironmentSpecError(f"budget B={schema.B} exceeds population N={schema.N}")

    features = tuple(FeatureDimension(f.name, tuple(f.levels)) for f in schema.features)
    levels_by_dim = {f.name: f.levels for f in features}

    ids = [t.id for t in schema.types]
    if len(set(ids)) != len(ids):
        raise EnvironmentSpecError(f"duplicate type ids: {ids}")

    total = sum(t.count for t in schema.types)
    if total != schema.N:
        raise EnvironmentSpecError(f"type counts sum to {total}, but N={schema.N}")

    # 특성 클래스: 타입 순서대로 고유한 레벨 조합에 0..Z-1 부여
    class_by_labels: Dict[Tuple[Tuple[str, str], ...], FeatureClass] = {}
    types: List[ArmType] = []
    for t in sorted(schema.types, key=lambda t: t.id):
        labels = _class_labels(t, features, levels_by_dim)
        fc = class_by_labels.get(labels)
        if fc is None:
            fc = FeatureClass(id=len(class_by_labels), labels=labels)
            class_by_labels[labels] = fc

        types.append(
            ArmType(
                id=t.id,
                feature_class=fc,
                kernel=_build_kernel(t),
                base_reward=_build_base_reward(t),
                count=t.count,
                initial_state=_check_state(t.initial_state, f"type {t.id} initial_state"),
            )
        )

    arm_type_of = np.repeat(np.arange(len(types)), [t.count for t in types])

    aliases: Dict[str, Tuple[str, str]] = {}
    for alias, mapping in schema.aliases.items():
        if len(mapping) != 1:
            raise EnvironmentSpecError(f"alias {alias!r} must map exactly one dimension")
        (dim, level), = mapping.items()
        if level not in levels_by_dim.get(dim, []):
            raise EnvironmentSpecError(f"alias {alias!r} refers to unknown level {dim}={level}")
        aliases[alias] = (dim, level)

    return Environment(
        name=schema.name,
        features=features,
        classes=tuple(class_by_labels.values()),
        types=tuple(types),
        arm_type_of=arm_type_of,
        B=schema.B,
        T=schema.T,
        aliases=aliases,
        description=schema.description,
    )


def _class_labels(
    t: TypeSchema,
    features: Tuple[FeatureDimension, ...],
    levels_by_dim: Dict[str, List[str]],
) -> Tuple[Tuple[str, str], ...]:
    unknown = set(t.features) - set(levels_by_dim)
    if unknown:
        raise EnvironmentSpecError(f"type {t.id}: unknown feature dimensions {sorted(unknown)}")

    labels = []
    for dim in features:
        level = t.features.get(dim.name)
        if level is None:
            raise EnvironmentSpecError(f"type {t.id}: missing level for dimension {dim.name!r}")
        if level not in dim.levels:
            raise EnvironmentSpecError(f"type {t.id}: unknown level {dim.name}={level!r}")
        labels.append((dim.name, level))
    return tuple(labels)


def _build_kernel(t: TypeSchema) -> TransitionKernel:
    """transitions 블록 검증 후 커널 생성"""
    unknown = set(t.transitions) - set(TRANSITION_KEYS)
    if unknown:
        raise EnvironmentSpecError(
            f"type {t.id}: unknown transition rows {sorted(unknown)} "
            f"(expected {', '.join(TRANSITION_KEYS)})"
        )

    p_up = np.empty((2, 2), dtype=np.float64)
    for key, (s, a) in TRANSITION_KEYS.items():
        row = t.transitions.get(key)
        if row is None:
            raise EnvironmentSpecError(f"type {t.id}: missing transition row {key}")
        if len(row) != 2:
            raise EnvironmentSpecError(f"type {t.id}, s={s}, a={a}: row must have 2 entries")
        if any(not math.isfinite(p) or p < 0.0 or p > 1.0 for p in row):
            raise EnvironmentSpecError(
                f"type {t.id}, s={s}, a={a}: probabilities must lie in [0, 1], got {row}"
            )
        if abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
            raise EnvironmentSpecError(
                f"type {t.id}, s={s}, a={a}: row sums to {sum(row):.12g}, expected 1"
            )
        p_up[s, a] = row[1]
    return TransitionKernel.from_up_probabilities(p_up)


def _build_base_reward(t: TypeSchema) -> Tuple[float, float]:
    unknown = set(t.base_reward) - {"0", "1"}
    if unknown:
        raise EnvironmentSpecError(f"type {t.id}: unknown base_reward states {sorted(unknown)}")
    try:
        r0, r1 = t.base_reward["0"], t.base_reward["1"]
    except KeyError as e:
        raise EnvironmentSpecError(f"type {t.id}: base_reward missing state {e}") from e
    if not (math.isfinite(r0) and math.isfinite(r1)):
        raise EnvironmentSpecError(f"type {t.id}: base_reward must be finite")
    return (float(r0), float(r1))


def _check_state(value: int, what: str) -> int:
    if value not in (0, 1):
        raise EnvironmentSpecError(f"{what}: state must be 0 or 1, got {value}")
    return value


def dump_environment(env: Environment) -> str:
    """Environment → 명세 JSON (테스트 픽스처, 재현용)"""
    doc = {
        "name": env.name,
        "description": env.description,
        "N": env.N,
        "B": env.B,
        "T": env.T,
        "features": [{"name": f.name, "levels": list(f.levels)} for f in env.features],
        "aliases": {k: {d: lv} for k, (d, lv) in env.aliases.items()},
        "types": [
            {
                "id": t.id,
                "features": dict(t.feature_class.labels),
                "count": t.count,
                "base_reward": {"0": t.base_reward[0], "1": t.base_reward[1]},
                "transitions": {
                    key: [float(t.kernel.p[s, a, 0]), float(t.kernel.p[s, a, 1])]
                    for key, (s, a) in TRANSITION_KEYS.items()
                },
                "initial_state": t.initial_state,
            }
            for t in env.types
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False)
