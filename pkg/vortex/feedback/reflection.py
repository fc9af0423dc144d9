"""궤적 비교와 언어 피드백

에피소드 k 와 k-1 의 지표만 비교합니다.
문구는 templates/<name>.json 에서 읽습니다.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Tuple

import numpy as np

from vortex.errors import MetricsError
from vortex.feedback.models import Deltas, VerbalFeedback
from vortex.metrics.models import Coverage, EpisodeMetrics, PreferenceSpec

# 분포 차이 잡음 허용치 (이하이면 지시를 만들지 않음)
DEVIATION_TOLERANCE = 1e-9


@lru_cache(maxsize=None)
def load_templates(name: str = "en") -> Dict:
    """피드백/프롬프트 템플릿 리소스 로드"""
    text = resources.files("vortex.feedback").joinpath("templates", f"{name}.json").read_text(
        "utf-8"
    )
    return json.loads(text)


def _coverage_delta(curr: Coverage, prev: Coverage) -> Coverage:
    if set(curr) != set(prev):
        raise MetricsError(f"coverage dimensions differ: {sorted(curr)} vs {sorted(prev)}")
    return {
        dim: {level: curr[dim][level] - prev[dim].get(level, 0.0) for level in curr[dim]}
        for dim in curr
    }


def compare(m_curr: EpisodeMetrics, m_prev: EpisodeMetrics) -> Deltas:
    """δ_U = U_k - U_{k-1}, δ_D(z) = D_k(z) - D_{k-1}(z)

    Raises:
        MetricsError: 클래스 수나 커버리지 차원이 다름
    """
    if len(m_curr.D) != len(m_prev.D):
        raise MetricsError(
            f"dimension mismatch: {len(m_curr.D)} classes vs {len(m_prev.D)} classes"
        )
    dD = m_curr.D.d - m_prev.D.d
    return Deltas(
        dU=m_curr.U - m_prev.U,
        dD=tuple(float(v) for v in dD),
        dC=m_curr.C - m_prev.C,
        dCoverage=_coverage_delta(m_curr.coverage, m_prev.coverage),
    )


def _rank_directives(
    m_curr: EpisodeMetrics,
    pref: PreferenceSpec,
    limit: int,
) -> Tuple[List[int], List[int]]:
    """목표 대비 편차 크기순 (under-served, over-served) 클래스"""
    gap = m_curr.D.d - pref.target.d
    order = sorted(range(len(gap)), key=lambda z: (-abs(gap[z]), z))
    under = [z for z in order if gap[z] < -DEVIATION_TOLERANCE][:limit]
    over = [z for z in order if gap[z] > DEVIATION_TOLERANCE][:limit]
    return under, over


def render_feedback(
    d: Deltas,
    pref: PreferenceSpec,
    m_curr: EpisodeMetrics,
    templates: Optional[Dict] = None,
) -> VerbalFeedback:
    """변화량을 고정 템플릿으로 문장화 (순수 함수)"""
    tpl = templates or load_templates()
    lines = tpl["feedback"]
    sentences: List[str] = []

    prev_U = m_curr.U - d.dU
    if d.dU == 0:
        sentences.append(lines["utility_unchanged"].format(current=m_curr.U))
    else:
        relative = abs(d.dU) / max(abs(prev_U), 1.0)
        sentences.append(
            lines["utility_changed"].format(
                direction="increased" if d.dU > 0 else "decreased",
                qualifier="slightly" if relative < tpl["qualifier_threshold"] else "substantially",
                delta=d.dU,
            )
        )

    if pref.focus is not None and pref.focus[0] in m_curr.coverage:
        dim, level = pref.focus
        current = 100.0 * m_curr.coverage_of(dim, level)
        delta = 100.0 * d.dCoverage.get(dim, {}).get(level, 0.0)
        if delta == 0:
            sentences.append(
                lines["coverage_unchanged"].format(dimension=dim, level=level, current=current)
            )
        else:
            sentences.append(
                lines["coverage_changed"].format(
                    dimension=dim,
                    level=level,
                    direction="increased" if delta > 0 else "decreased",
                    previous=current - delta,
                    current=current,
                    delta=delta,
                )
            )
    else:
        sentences.append(lines["divergence"].format(previous=m_curr.C - d.dC, current=m_curr.C))

    under, over = _rank_directives(m_curr, pref, int(tpl["max_directives"]))
    for key, classes in (("increase", under), ("decrease", over)):
        for z in classes:
            sentences.append(
                lines[key].format(
                    label=pref.label(z),
                    served=100.0 * float(m_curr.D.d[z]),
                    target=100.0 * float(pref.target.d[z]),
                )
            )
    if not under and not over:
        sentences.append(lines["aligned"])

    return VerbalFeedback(
        text="\n".join(sentences),
        deltas=d,
        increase=tuple(under),
        decrease=tuple(over),
    )


def total_shift(d: Deltas) -> float:
    """δ_D 의 L1 크기 (로그용)"""
    return float(np.abs(np.asarray(d.dD)).sum())
