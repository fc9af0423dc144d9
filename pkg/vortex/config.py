"""실행 설정 (RunConfig)

JSON 파일을 pydantic 모델로 읽습니다. 상대 경로는 설정 파일 위치 기준입니다.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from vortex.errors import ConfigError
from vortex.rmab.reader import BUNDLED_SPECS

# K 가 이보다 크면 프롬프트에 최근 피드백만 남김
DEFAULT_FEEDBACK_WINDOW = 10

BackendName = Literal["analytic", "scripted", "remote"]


class PreferenceSettings(BaseModel):
    """선호 지시문"""
    model_config = ConfigDict(extra="forbid")

    directive: str = Field(
        default="favor income=Low",
        description="지시문: [favor] dimension=level 또는 환경 명세의 alias (예: LI)",
    )
    rho: float = Field(default=0.75, ge=0.0, le=1.0, description="선호 레벨에 줄 목표 질량")
    divergence: Literal["kl", "tv"] = Field(default="kl", description="선호 위반 divergence")
    target: Optional[List[float]] = Field(
        default=None,
        description="명시적 목표 분포 (주면 directive 대신 사용, directive 는 설명용)",
    )


class SolverSettings(BaseModel):
    """솔버"""
    model_config = ConfigDict(extra="forbid")

    index: Literal["advantage", "whittle"] = Field(default="advantage", description="인덱스 종류")
    exact_budget: bool = Field(default=True, description="매 라운드 정확히 min(B, N) 개 행동")


class AnalyticSettings(BaseModel):
    """해석적 백엔드"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: float = Field(default=0.5, alias="lambda", gt=0.0, le=1.0, description="스칼라화 가중치")
    eta0: float = Field(default=1.75, ge=0.0, description="확률적 근사 기본 보폭")
    mode: Literal["sa", "closed_form"] = Field(default="sa", description="갱신 방식")
    estimator: Literal["damped", "visitation"] = Field(
        default="damped",
        description="sa 기울기 추정기: damped 는 평균 방문 분포와 현재 R, visitation 은 직전 D",
    )
    smoothing: float = Field(
        default=0.15, ge=0.0, lt=1.0, description="damped 추정기에서 D̄ 를 목표 쪽으로 섞는 비율"
    )
    center_gradient: bool = Field(default=True, description="기울기의 클래스 공통 성분 제거")
    normalize_utility: bool = Field(
        default=True, description="U 를 B*T 로 나눠 pull 당 효용으로 스칼라화"
    )


class RemoteSettings(BaseModel):
    """원격 LLM 백엔드"""
    model_config = ConfigDict(extra="forbid")

    endpoint: Optional[str] = Field(default=None, description="API base URL")
    model: Optional[str] = Field(default=None, description="모델명")
    api_key_env: str = Field(default="VORTEX_LLM_API_KEY", description="API 키 환경변수 이름")
    temperature: float = Field(default=0.0, ge=0.0)
    timeout: float = Field(default=120.0, gt=0.0)
    max_attempts: int = Field(default=3, ge=1)


class ScriptedSettings(BaseModel):
    """스크립트 백엔드"""
    model_config = ConfigDict(extra="forbid")

    script: Optional[str] = Field(default=None, description="JSON 배열 또는 episodes.jsonl 경로")


class EarlyStopSettings(BaseModel):
    """조기 종료: 연속 shaping 변화의 max-norm 이 tol 미만인 에피소드가 patience 번 이어지면 종료"""
    model_config = ConfigDict(extra="forbid")

    tol: float = Field(default=1e-3, ge=0.0)
    patience: int = Field(default=3, ge=0, description="0 이면 조기 종료 안 함")


class RunConfig(BaseModel):
    """VORTEX 실행 설정"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    env: str = Field(default="armman", description="환경 명세 경로 또는 번들 이름")
    preference: PreferenceSettings = Field(default_factory=PreferenceSettings)
    backend: BackendName = Field(default="analytic")
    analytic: AnalyticSettings = Field(default_factory=AnalyticSettings)
    remote: RemoteSettings = Field(default_factory=RemoteSettings)
    scripted: ScriptedSettings = Field(default_factory=ScriptedSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    early_stop: EarlyStopSettings = Field(default_factory=EarlyStopSettings)
    episodes: int = Field(default=10, ge=1, description="에피소드 수 K")
    seed: int = Field(default=0, ge=0, description="마스터 시드")
    common_random_numbers: bool = Field(default=True, description="에피소드 간 환경 난수 공유")
    r_max: float = Field(default=1.0, gt=0.0, description="shaping 절댓값 상한")
    feedback_max_entries: Optional[int] = Field(
        default=None,
        ge=0,
        description="프롬프트에 남길 최근 피드백 수 (None 이면 K > 10 일 때 10, 아니면 전부)",
    )
    out: Optional[str] = Field(default=None, description="결과 디렉토리")

    @model_validator(mode="after")
    def _backend_inputs(self) -> "RunConfig":
        if self.backend == "scripted" and not self.scripted.script:
            raise ValueError("scripted backend requires scripted.script")
        return self

    @property
    def prompt_window(self) -> Optional[int]:
        """렌더링할 때 남길 최근 피드백 수 (None 이면 전부)"""
        if self.feedback_max_entries is not None:
            return self.feedback_max_entries
        return DEFAULT_FEEDBACK_WINDOW if self.episodes > DEFAULT_FEEDBACK_WINDOW else None

    def check_files(self) -> "RunConfig":
        """참조 파일 존재 확인"""
        if self.env not in BUNDLED_SPECS and not Path(self.env).is_file():
            raise ConfigError(f"environment spec not found: {self.env}")
        if self.backend == "scripted" and not Path(self.scripted.script).is_file():
            raise ConfigError(f"shaping script not found: {self.scripted.script}")
        return self

    def config_hash(self) -> str:
        """결과 디렉토리를 제외한 설정의 sha256"""
        text = self.model_dump_json(by_alias=True, exclude={"out"})
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def with_overrides(self, **updates) -> "RunConfig":
        """필드 덮어쓰기 후 재검증한 새 설정"""
        data = self.model_dump(by_alias=True)
        for key, value in updates.items():
            if value is None:
                continue
            if key == "lam":
                data["analytic"]["lambda"] = value
            elif key == "script":
                data["scripted"]["script"] = value
            else:
                data[key] = value
        return parse_config(data)


def parse_config(data: Union[dict, str]) -> RunConfig:
    """dict 또는 JSON 문자열 → RunConfig"""
    try:
        if isinstance(data, str):
            return RunConfig.model_validate_json(data)
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {e}") from e


def _resolve(base: Path, value: Optional[str]) -> Optional[str]:
    if value is None or value in BUNDLED_SPECS:
        return value
    path = Path(value)
    return str(path if path.is_absolute() else (base / path))


def load_config(path: Union[str, Path]) -> RunConfig:
    """설정 파일 로드, 상대 경로 해석, 참조 파일 확인"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e

    cfg = parse_config(text)
    base = path.parent
    cfg = cfg.model_copy(
        update={
            "env": _resolve(base, cfg.env),
            "scripted": cfg.scripted.model_copy(
                update={"script": _resolve(base, cfg.scripted.script)}
            ),
        }
    )
    return cfg.check_files()
