"""선호 지시문 → 목표 분포

지시문 문법:
    [favor] <dimension>=<level>
    [favor] <alias>            (환경 명세의 aliases, 예: LI → income=Low)

해당 레벨을 가진 클래스에 총 질량 rho, 나머지 클래스에 1-rho 를 주고
각 쪽 안에서는 클래스 인구 비율대로 나눕니다.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence, Tuple

import numpy as np

from vortex.errors import ConfigError
from vortex.metrics.models import DivergenceKind, FeatureDistribution, PreferenceSpec
from vortex.rmab.models import Environment

DEFAULT_RHO = 0.75

_FAVOR_PREFIX = re.compile(r"^\s*(?:favou?r)\s+", re.IGNORECASE)


def parse_directive(directive: str, env: Environment) -> Tuple[str, str]:
    """지시문 → (dimension, level)"""
    text = _FAVOR_PREFIX.sub("", directive).strip()
    if not text:
        raise ConfigError(f"empty preference directive: {directive!r}")

    if text in env.aliases:
        return env.aliases[text]

    if "=" in text:
        dim, level = (part.strip() for part in text.split("=", 1))
        for f in env.features:
            if f.name.lower() == dim.lower():
                for lv in f.levels:
                    if lv.lower() == level.lower():
                        return f.name, lv
                raise ConfigError(f"unknown level {level!r} for dimension {f.name!r}")
        raise ConfigError(f"unknown feature dimension {dim!r}")

    lowered = {k.lower(): v for k, v in env.aliases.items()}
    if text.lower() in lowered:
        return lowered[text.lower()]
    known = ", ".join(sorted(env.aliases)) or "none"
    raise ConfigError(
        f"cannot parse directive {directive!r}; use dimension=level or an alias ({known})"
    )


def compile_directive(
    directive: str,
    env: Environment,
    rho: float = DEFAULT_RHO,
    kind: DivergenceKind = "kl",
) -> PreferenceSpec:
    """질적 지시문을 목표 분포가 있는 PreferenceSpec 으로 변환"""
    if not (0.0 <= rho <= 1.0):
        raise ConfigError(f"rho must lie in [0, 1], got {rho}")

    dim, level = parse_directive(directive, env)
    counts = env.class_counts().astype(np.float64)
    favored = np.array([fc.level_of(dim) == level for fc in env.classes])

    target = np.zeros(env.n_classes)
    in_mass, out_mass = counts[favored].sum(), counts[~favored].sum()
    if out_mass == 0:
        target[favored] = counts[favored] / in_mass
    elif in_mass == 0:
        raise ConfigError(f"no arms have {dim}={level}")
    else:
        target[favored] = rho * counts[favored] / in_mass
        target[~favored] = (1.0 - rho) * counts[~favored] / out_mass

    return PreferenceSpec(
        directive_text=directive,
        target=FeatureDistribution(target),
        kind=kind,
        class_labels=tuple(env.class_labels()),
        focus=(dim, level),
        rho=rho,
    )


def preference_from_target(
    target: Sequence[float],
    env: Environment,
    kind: DivergenceKind = "kl",
    directive_text: str = "explicit target",
    focus: Optional[Tuple[str, str]] = None,
) -> PreferenceSpec:
    """명시적 목표 분포로 PreferenceSpec 생성"""
    if len(target) != env.n_classes:
        raise ConfigError(f"target has {len(target)} entries, environment has {env.n_classes}")
    return PreferenceSpec(
        directive_text=directive_text,
        target=FeatureDistribution(np.asarray(target, dtype=np.float64)),
        kind=kind,
        class_labels=tuple(env.class_labels()),
        focus=focus,
    )
