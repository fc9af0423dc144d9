"""프롬프트 상태: 고정 블록 ‖ 누적 피드백 ‖ 출력 계약"""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Dict, List, Optional, Tuple

from vortex.feedback.models import PromptState, VerbalFeedback
from vortex.feedback.reflection import load_templates
from vortex.metrics.models import PreferenceSpec
from vortex.rmab.models import Environment


def build_fixed_blocks(
    env: Environment,
    pref: PreferenceSpec,
    r_max: float = 1.0,
    templates: Optional[Dict] = None,
) -> Tuple[str, str]:
    """(Task + Context, Instruction + Output) 블록 생성 (JSON 출력 계약 포함)"""
    tpl = (templates or load_templates())["prompt"]
    lines = [
        tpl["task"].format(budget=env.B, population=env.N, horizon=env.T),
        "",
        tpl["context_header"].format(name=env.name),
    ]
    for fc, count in zip(env.classes, env.class_counts()):
        lines.append(
            tpl["context_class"].format(
                id=fc.id, label=fc.name, count=int(count), target=100.0 * pref.target.d[fc.id]
            )
        )
    lines.append(tpl["context_preference"].format(directive=pref.directive_text, kind=pref.kind))
    example = json.dumps({str(fc.id): 0.0 for fc in env.classes})
    closing = [tpl["instruction"], "", tpl["output"].format(r_max=r_max, example=example)]
    return "\n".join(lines), "\n".join(closing)


def build_fixed_prompt(
    env: Environment,
    pref: PreferenceSpec,
    r_max: float = 1.0,
    templates: Optional[Dict] = None,
) -> PromptState:
    """피드백이 없는 초기 프롬프트 상태"""
    fixed, closing = build_fixed_blocks(env, pref, r_max, templates)
    return PromptState(fixed=fixed, closing=closing)


def update_prompt(p: PromptState, fb: VerbalFeedback) -> PromptState:
    """피드백 문장을 editable 끝에 추가한 새 상태 반환"""
    return replace(p, editable=p.editable + (fb.text,))


def render_prompt(
    p: PromptState,
    max_entries: Optional[int] = None,
    templates: Optional[Dict] = None,
) -> str:
    """fixed ‖ Reflection ‖ closing

    max_entries 를 주면 최근 항목만 남기고 이전 항목은 한 줄 요약으로 접습니다.
    """
    tpl = (templates or load_templates())["prompt"]
    entries: List[str] = list(p.editable)
    body: List[str] = []
    if max_entries is not None and len(entries) > max_entries:
        omitted = len(entries) - max_entries
        body.append(tpl["digest"].format(count=omitted))
        entries = entries[omitted:]
    body.extend(entries)
    reflection = "\n".join([tpl["reflection_header"], *body]) if body else tpl["reflection_header"]
    blocks = [p.fixed, reflection] + ([p.closing] if p.closing else [])
    return "\n\n".join(blocks)
