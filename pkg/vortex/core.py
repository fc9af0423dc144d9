"""
VortexRunner 메인 클래스

에피소드마다 shaping 제안 → 정책 계산 → 전개 → 지표 → 비교/피드백 → 프롬프트 갱신을
반복합니다.
"""

from __future__ import annotations

import logging
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import httpx

from vortex.artifacts.models import EpisodeRecord, RunResult
from vortex.artifacts.reader import read_run
from vortex.artifacts.writer import EPISODES_FILE, write_run
from vortex.config import RunConfig, parse_config
from vortex.errors import ConfigError, ProposalError, RunAbortedError, VortexError
from vortex.feedback.prompt import build_fixed_prompt, update_prompt
from vortex.feedback.reflection import compare, render_feedback, total_shift
from vortex.metrics.evaluation import evaluate_episode
from vortex.metrics.models import EpisodeMetrics, PreferenceSpec
from vortex.metrics.pareto import ParetoArchive, ParetoPoint
from vortex.metrics.preference import compile_directive, preference_from_target
from vortex.rmab.models import Environment
from vortex.rmab.reader import resolve_environment
from vortex.rmab.simulator import rollout, spawn_stream, stream_seed
from vortex.shaper.analytic import AnalyticShaper
from vortex.shaper.base import ShaperBackend, ShaperContext
from vortex.shaper.remote import RemoteShaper
from vortex.shaper.scripted import ScriptedShaper
from vortex.shaping.models import ScalarizationConfig, ShapingReward
from vortex.solver.index import solve_policy

logger = logging.getLogger(__name__)


def build_preference(cfg: RunConfig, env: Environment) -> PreferenceSpec:
    """설정의 선호 지시문(또는 명시적 목표) → PreferenceSpec"""
    pref = cfg.preference
    if pref.target is not None:
        return preference_from_target(pref.target, env, pref.divergence, pref.directive)
    return compile_directive(pref.directive, env, pref.rho, pref.divergence)


def scalarization_config(cfg: RunConfig, env: Environment) -> ScalarizationConfig:
    """해석적 백엔드 설정 → ScalarizationConfig"""
    pulls = env.pulls_per_round * env.T
    return ScalarizationConfig(
        lam=cfg.analytic.lam,
        B=env.pulls_per_round,
        T=env.T,
        eta0=cfg.analytic.eta0,
        R_max=cfg.r_max,
        utility_scale=float(pulls) if cfg.analytic.normalize_utility else 1.0,
        smoothing=cfg.analytic.smoothing,
    )


def _versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for package in ("vortex-rmab", "numpy", "pydantic", "httpx"):
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


class VortexRunner:
    """VORTEX 루프 실행 클래스"""

    def __init__(
        self,
        config: RunConfig,
        env: Optional[Environment] = None,
        shaper: Optional[ShaperBackend] = None,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        """
        Args:
            config: 실행 설정
            env: 환경 (없으면 config.env 에서 로드)
            shaper: shaper 백엔드 (없으면 config.backend 로 생성)
            transport: 원격 백엔드용 httpx 전송 계층 (테스트용)
        """
        self.config = config
        self.env = env or resolve_environment(config.env)
        self.pref = build_preference(config, self.env)
        self.transport = transport
        self._shaper: ShaperBackend = shaper or self._create_shaper_backend()

    def _create_shaper_backend(self) -> ShaperBackend:
        """shaper 백엔드 인스턴스 생성"""
        cfg = self.config
        if cfg.backend == "analytic":
            return AnalyticShaper(
                scalarization_config(cfg, self.env),
                mode=cfg.analytic.mode,
                center_gradient=cfg.analytic.center_gradient,
                estimator=cfg.analytic.estimator,
            )
        elif cfg.backend == "scripted":
            return ScriptedShaper.from_file(cfg.scripted.script, r_max=cfg.r_max)
        elif cfg.backend == "remote":
            return RemoteShaper(
                model=cfg.remote.model,
                base_url=cfg.remote.endpoint,
                api_key_env=cfg.remote.api_key_env,
                temperature=cfg.remote.temperature,
                r_max=cfg.r_max,
                max_attempts=cfg.remote.max_attempts,
                timeout=cfg.remote.timeout,
                max_prompt_entries=cfg.prompt_window,
                transport=self.transport,
            )
        else:
            raise ConfigError(f"Unknown backend: {cfg.backend}")

    def _episode_stream(self, k: int):
        """공통 난수면 모든 에피소드가 같은 환경 스트림, 아니면 에피소드별 스트림"""
        if self.config.common_random_numbers:
            keys: Tuple = ("env",)
        else:
            keys = ("episode", k)
        return spawn_stream(self.config.seed, *keys), stream_seed(self.config.seed, *keys)

    def run(self, out: Optional[Union[str, Path]] = None) -> RunResult:
        """
        VORTEX 루프 실행

        Args:
            out: 결과 디렉토리 (없으면 config.out, 둘 다 없으면 기록 안 함)

        Returns:
            에피소드 기록, 최종 프롬프트, 파레토 아카이브, manifest

        Raises:
            RunAbortedError: shaper 제안 실패 (부분 결과는 기록 후 e.result 에 보존)
        """
        cfg, env, pref = self.config, self.env, self.pref
        out_dir = out or cfg.out

        prompt = build_fixed_prompt(env, pref, cfg.r_max)
        history: List[EpisodeMetrics] = []
        records: List[EpisodeRecord] = []
        archive = ParetoArchive()
        prev_shaping: Optional[ShapingReward] = None
        streak = 0
        stopped_early = False
        error: Optional[str] = None
        started = time.perf_counter()

        for k in range(cfg.episodes):
            t0 = time.perf_counter()
            ctx = ShaperContext(
                prompt=prompt,
                metrics_history=tuple(history),
                pref=pref,
                k=k,
                env_summary=env.summary(),
            )
            try:
                proposal = self._shaper.propose(ctx)
            except ProposalError as e:
                error = f"episode {k}: {e}"
                logger.error("shaper proposal failed, aborting run: %s", error)
                break

            shaping = proposal.shaping
            policy = solve_policy(env, shaping, cfg.solver.index, cfg.solver.exact_budget)
            rng, seed = self._episode_stream(k)
            traj = rollout(env, policy, rng)
            metrics = evaluate_episode(traj, env, pref)

            deltas = feedback_text = None
            if k > 0:
                deltas = compare(metrics, history[-1])
                fb = render_feedback(deltas, pref, metrics)
                prompt = update_prompt(prompt, fb)
                feedback_text = fb.text
                logger.debug(
                    "episode %d: dU=%+.3f, |dD|=%.4f, dC=%+.5f",
                    k, deltas.dU, total_shift(deltas), deltas.dC,
                )

            history.append(metrics)
            records.append(
                EpisodeRecord(
                    k=k,
                    shaping=shaping.as_list(),
                    U=metrics.U,
                    D=metrics.D.as_list(),
                    C=metrics.C,
                    coverage=metrics.coverage,
                    seed=seed,
                    deltas=deltas,
                    feedback=feedback_text,
                    wall_time=time.perf_counter() - t0,
                )
            )
            archive.add(metrics.U, metrics.C, tag=str(k), shaping_id=f"k{k}")
            logger.info(
                "episode %d: U=%.2f C=%.4f coverage=%s",
                k, metrics.U, metrics.C, _focus_coverage(metrics, pref),
            )

            settled = (
                prev_shaping is not None
                and shaping.max_abs_change(prev_shaping) < cfg.early_stop.tol
            )
            if settled:
                streak += 1
            else:
                streak = 0
            prev_shaping = shaping
            if cfg.early_stop.patience and streak >= cfg.early_stop.patience:
                stopped_early = k + 1 < cfg.episodes
                if stopped_early:
                    logger.info("shaping converged; stopping early after episode %d", k)
                break

        result = RunResult(
            records=records,
            prompt=prompt,
            archive=archive,
            stopped_early=stopped_early,
            error=error,
        )
        result.manifest = self._manifest(result, time.perf_counter() - started)
        if out_dir is not None:
            write_run(result, out_dir)
        if error is not None:
            raise RunAbortedError(error, result=result)
        return result

    def _manifest(self, result: RunResult, total_time: float) -> Dict[str, object]:
        cfg, env, pref = self.config, self.env, self.pref
        return {
            "config": cfg.model_dump(mode="json", by_alias=True),
            "config_hash": cfg.config_hash(),
            "versions": _versions(),
            "environment": env.summary(),
            "backend": self._shaper.name,
            "lambda": cfg.analytic.lam if self._shaper.name == "analytic" else None,
            "divergence": pref.kind,
            "preference": {
                "directive": pref.directive_text,
                "rho": pref.rho,
                "focus": list(pref.focus) if pref.focus else None,
                "target": pref.target.as_list(),
                "class_labels": list(pref.class_labels),
            },
            "episodes": len(result.records),
            "stopped_early": result.stopped_early,
            "error": result.error,
            "timings": {
                "episodes": [r.wall_time for r in result.records],
                "total": total_time,
            },
        }


def _focus_coverage(metrics: EpisodeMetrics, pref: PreferenceSpec) -> str:
    if pref.focus is None:
        return "-"
    dim, level = pref.focus
    return f"{dim}={level}:{metrics.coverage.get(dim, {}).get(level, 0.0):.3f}"


def run_vortex(cfg: RunConfig, **kwargs) -> RunResult:
    """설정으로 VORTEX 루프 한 번 실행"""
    return VortexRunner(cfg, **kwargs).run()


@dataclass
class SweepResult:
    """λ 스윕 결과: 원시 점 아카이브(태그 lambda=…) 와 실패한 λ"""
    archive: ParetoArchive
    results: Dict[float, RunResult] = field(default_factory=dict)
    failures: Dict[float, str] = field(default_factory=dict)

    def frontier(self) -> List[ParetoPoint]:
        return self.archive.frontier()


def sweep_lambda(
    cfg: RunConfig,
    lambdas: Sequence[float],
    out: Optional[Union[str, Path]] = None,
    workers: int = 1,
    env: Optional[Environment] = None,
) -> SweepResult:
    """λ 마다 해석적 백엔드로 실행하고 최종 (U, C) 를 모음

    한 λ 의 실패는 기록만 하고 나머지 스윕을 계속합니다.
    """
    env = env or resolve_environment(cfg.env)
    base_out = Path(out) if out is not None else None

    def run_one(lam: float) -> RunResult:
        sub = None if base_out is None else str(base_out / f"lambda_{lam:g}")
        run_cfg = cfg.with_overrides(backend="analytic", lam=lam, out=sub)
        return VortexRunner(run_cfg, env=env).run()

    outcomes: List[Tuple[float, Optional[RunResult], Optional[str]]] = []

    def guarded(lam: float):
        try:
            return lam, run_one(lam), None
        except VortexError as e:
            logger.error("sweep run failed for lambda=%g: %s", lam, e)
            return lam, None, str(e)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(guarded, lambdas))
    else:
        outcomes = [guarded(lam) for lam in lambdas]

    sweep = SweepResult(archive=ParetoArchive())
    for lam, result, failure in outcomes:
        if result is None:
            sweep.failures[lam] = failure or "unknown error"
            continue
        final = result.final
        sweep.results[lam] = result
        sweep.archive.add(final.U, final.C, tag=f"lambda={lam:g}", shaping_id=f"k{final.k}")
    return sweep


def replay_run(
    run_dir: Union[str, Path],
    out: Optional[Union[str, Path]] = None,
) -> RunResult:
    """기록된 실행의 shaping 을 스크립트 백엔드로 재생"""
    run_dir = Path(run_dir)
    records, manifest = read_run(run_dir)
    if not records:
        raise ConfigError(f"no episodes recorded in {run_dir}")
    cfg = parse_config(manifest["config"]).with_overrides(
        backend="scripted",
        script=str(run_dir / EPISODES_FILE),
        episodes=len(records),
    )
    cfg = cfg.model_copy(update={"out": str(out) if out is not None else None})
    return VortexRunner(cfg).run()
