"""원격 LLM shaper 백엔드 - chat completions 호환 HTTP API

프롬프트를 렌더링해 한 번 요청하고, 응답 텍스트의 첫 JSON 객체를
{클래스 id: shaping 값} 으로 읽어 검증합니다.
"""

from __future__ import annotations

import json
import logging
import os
import re
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

import httpx

from vortex.errors import (
    ConfigError,
    OutputParseError,
    ProposalError,
    RemoteRequestError,
)
from vortex.feedback.prompt import render_prompt
from vortex.feedback.reflection import load_templates
from vortex.shaper.base import ShaperBackend, ShaperContext, ShaperOutput, validate_shaping_vector

logger = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "VORTEX_LLM_API_KEY"
DEFAULT_BASE_URL = "https://openrouter.ai/api/v1"
DEFAULT_MODEL = "google/gemini-2.5-pro"

# 재시도할 HTTP 상태 코드
RETRYABLE_STATUS = {408, 409, 429, 500, 502, 503, 504}


def extract_json_object(content: str) -> Dict[str, Any]:
    """응답 텍스트에서 첫 최상위 JSON 객체 추출

    코드블록 표시는 무시하고 본문에서 처음 디코딩되는 객체를 돌려줍니다.

    Raises:
        OutputParseError: JSON 객체가 없음
    """
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", content):
        try:
            obj, _ = decoder.raw_decode(content, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    raise OutputParseError(f"no JSON object in response: {content[:200]!r}")


class RemoteShaper(ShaperBackend):
    """chat completions API 기반 shaper

    네트워크 오류는 지수 백오프로 최대 max_attempts 번 시도하고,
    파싱 실패는 형식 안내를 덧붙여 한 번 다시 묻습니다.
    """

    name = "remote"

    def __init__(
        self,
        api_key: Optional[str] = None,
        model: Optional[str] = None,
        base_url: Optional[str] = None,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        temperature: float = 0.0,
        r_max: float = 1.0,
        max_attempts: int = 3,
        backoff: float = 2.0,
        timeout: float = 120.0,
        max_prompt_entries: Optional[int] = None,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        """
        Args:
            api_key: API 키 (없으면 api_key_env 환경변수 사용)
            model: 모델명 (없으면 VORTEX_LLM_MODEL 환경변수, 기본 gemini-2.5-pro)
            base_url: API URL (없으면 VORTEX_LLM_BASE_URL 환경변수, 기본 OpenRouter)
            api_key_env: API 키 환경변수 이름
            temperature: 샘플링 온도
            r_max: shaping 절댓값 상한 (넘으면 잘라내고 경고)
            max_attempts: 네트워크 오류 시 최대 시도 횟수
            backoff: 백오프 기본 지연(초), 시도마다 두 배
            timeout: 요청 타임아웃(초)
            max_prompt_entries: 프롬프트에 남길 최근 피드백 수
            transport: httpx 전송 계층 (테스트용)
            sleep: 백오프 대기 함수 (테스트용)
        """
        self.api_key = api_key or os.getenv(api_key_env)
        if not self.api_key:
            raise ConfigError(
                f"LLM API key required. Set via api_key parameter or {api_key_env} env var."
            )
        self.model = model or os.getenv("VORTEX_LLM_MODEL") or DEFAULT_MODEL
        base_url = base_url or os.getenv("VORTEX_LLM_BASE_URL") or DEFAULT_BASE_URL
        self.base_url = base_url.rstrip("/")
        self.temperature = temperature
        self.r_max = r_max
        self.max_attempts = max(1, max_attempts)
        self.backoff = backoff
        self.timeout = timeout
        self.max_prompt_entries = max_prompt_entries
        self._transport = transport
        self._sleep = sleep

    def propose(self, ctx: ShaperContext) -> ShaperOutput:
        prompt = render_prompt(ctx.prompt, max_entries=self.max_prompt_entries)
        messages: List[Dict[str, str]] = [{"role": "user", "content": prompt}]

        content = self._complete(messages)
        try:
            obj = extract_json_object(content)
        except OutputParseError:
            logger.warning(
                "episode %d: unparseable reply, asking again with format reminder", ctx.k
            )
            reminder = load_templates()["prompt"]["format_reminder"].format(last=ctx.n_classes - 1)
            messages += [
                {"role": "assistant", "content": content},
                {"role": "user", "content": reminder},
            ]
            obj = extract_json_object(self._complete(messages))

        values, rationale = self._unwrap(obj)
        shaping = validate_shaping_vector(values, ctx.n_classes, self.r_max, clamp=True)
        return ShaperOutput(
            shaping,
            backend=self.name,
            rationale=rationale,
            diagnostics={"model": self.model},
        )

    @staticmethod
    def _unwrap(obj: Dict[str, Any]) -> Tuple[Dict[str, Any], Optional[str]]:
        """{"shaping": {...}, "rationale": "..."} 감싼 형식 처리"""
        if isinstance(obj.get("shaping"), dict):
            rationale = obj.get("rationale")
            return obj["shaping"], str(rationale) if rationale is not None else None
        return obj, None

    def _complete(self, messages: List[Dict[str, str]]) -> str:
        """chat completions 요청 (지수 백오프 재시도)"""
        payload = {
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
        }
        headers = {
            "Authorization": f"Bearer {self.api_key}",
            "Content-Type": "application/json",
        }

        last_error: Optional[Exception] = None
        for attempt in range(1, self.max_attempts + 1):
            if attempt > 1:
                delay = self.backoff * (2 ** (attempt - 2))
                logger.warning(
                    "remote request failed (%s); retry %d/%d in %.1fs",
                    last_error, attempt, self.max_attempts, delay,
                )
                self._sleep(delay)
            try:
                with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                    response = client.post(
                        f"{self.base_url}/chat/completions",
                        json=payload,
                        headers=headers,
                    )
                    response.raise_for_status()
                    data = response.json()
            except httpx.HTTPStatusError as e:
                if e.response.status_code not in RETRYABLE_STATUS:
                    raise RemoteRequestError(
                        f"remote request rejected with HTTP {e.response.status_code}"
                    ) from e
                last_error = e
                continue
            except (httpx.TransportError, json.JSONDecodeError) as e:
                last_error = e
                continue

            try:
                return str(data["choices"][0]["message"]["content"])
            except (KeyError, IndexError, TypeError) as e:
                raise ProposalError(f"unexpected completion payload: {str(data)[:200]}") from e

        raise RemoteRequestError(
            f"remote request failed after {self.max_attempts} attempts: {last_error}"
        )
