"""vortex CLI"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import List, Optional

from vortex.artifacts.reader import merge_archives
from vortex.config import RunConfig, load_config
from vortex.core import replay_run, run_vortex, sweep_lambda
from vortex.errors import ConfigError, RunAbortedError, VortexError
from vortex.rmab.reader import resolve_environment


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="실행 설정 JSON 파일")
    parser.add_argument("--env", help="환경 명세 경로 또는 번들 이름 (armman, conservation)")
    parser.add_argument("--directive", help="선호 지시문 (예: 'favor income=Low', LI)")
    parser.add_argument("--seed", type=int, help="마스터 시드")
    parser.add_argument("--episodes", type=int, help="에피소드 수 K")
    parser.add_argument("--out", help="결과 디렉토리")
    parser.add_argument(
        "--no-crn",
        action="store_true",
        help="에피소드마다 다른 환경 난수 사용 (공통 난수 끄기)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="LLM shaping 으로 RMAB 정책을 선호에 맞추는 VORTEX 루프",
        prog="vortex",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG 로그 출력")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="VORTEX 루프 실행")
    _add_run_options(run)
    run.add_argument(
        "--backend",
        choices=["analytic", "scripted", "remote"],
        help="shaper 백엔드 (기본: 설정 또는 analytic)",
    )
    run.add_argument("--lambda", dest="lam", type=float, help="스칼라화 가중치 λ (해석적 백엔드)")
    run.add_argument("--script", help="스크립트 백엔드의 shaping 파일")

    sweep = sub.add_parser("sweep", help="λ 스윕 (해석적 백엔드)")
    _add_run_options(sweep)
    sweep.add_argument(
        "--lambdas",
        default="0.1,0.3,0.5,0.7,0.9",
        help="쉼표로 구분한 λ 목록 (기본: 0.1,0.3,0.5,0.7,0.9)",
    )
    sweep.add_argument("--workers", type=int, default=1, help="동시 실행 수")

    validate = sub.add_parser("validate-env", help="환경 명세 검증 및 요약")
    validate.add_argument("spec", help="환경 명세 경로 또는 번들 이름")

    replay = sub.add_parser("replay", help="기록된 실행을 스크립트 백엔드로 재생")
    replay.add_argument("run_dir", help="실행 결과 디렉토리")
    replay.add_argument("--out", help="재생 결과 디렉토리")

    pareto = sub.add_parser("pareto", help="여러 실행의 파레토 아카이브 병합")
    pareto.add_argument("run_dirs", nargs="+", help="실행 결과 디렉토리들")
    pareto.add_argument("-o", "--out", help="출력 CSV (기본: stdout)")
    pareto.add_argument("--all", action="store_true", help="지배된 점도 출력")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    """설정 파일 (없으면 기본값) 에 CLI 플래그 덮어쓰기"""
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {
        "env": args.env,
        "seed": args.seed,
        "episodes": args.episodes,
        "out": args.out,
        "backend": getattr(args, "backend", None),
        "lam": getattr(args, "lam", None),
        "script": getattr(args, "script", None),
    }
    if args.no_crn:
        overrides["common_random_numbers"] = False
    cfg = cfg.with_overrides(**overrides)
    if args.directive:
        cfg = cfg.model_copy(
            update={"preference": cfg.preference.model_copy(update={"directive": args.directive})}
        )
    return cfg.check_files()


def _parse_lambdas(text: str) -> List[float]:
    try:
        lambdas = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid --lambdas {text!r}: {e}") from e
    if not lambdas:
        raise ConfigError("--lambdas is empty")
    return lambdas


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    try:
        result = run_vortex(cfg)
    except RunAbortedError as e:
        if e.result is not None:
            print(f"Aborted after {len(e.result.records)} episodes", file=sys.stderr)
        raise
    final = result.final
    suffix = " (stopped early)" if result.stopped_early else ""
    print(f"Episodes: {len(result.records)}{suffix}")
    print(f"Final: U={final.U:.4f}, C={final.C:.6f}")
    print(f"Shaping: {', '.join(f'{v:+.4f}' for v in final.shaping)}")
    if cfg.out:
        print(f"Results: {cfg.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    lambdas = _parse_lambdas(args.lambdas)
    result = sweep_lambda(cfg, lambdas, out=cfg.out, workers=args.workers)
    frontier = {p.tag for p in result.frontier()}
    print("lambda\tU\tC\tfrontier")
    for p in result.archive.points:
        print(f"{p.tag.split('=', 1)[1]}\t{p.U:.4f}\t{p.C:.6f}\t{int(p.tag in frontier)}")
    for lam, message in result.failures.items():
        print(f"Failed lambda={lam:g}: {message}", file=sys.stderr)
    return 1 if result.failures else 0


def _cmd_validate_env(args: argparse.Namespace) -> int:
    env = resolve_environment(args.spec)
    print(f"{env.name}: N={env.N}, B={env.B}, T={env.T}, {len(env.types)} types")
    for c, n in zip(env.classes, env.class_counts()):
        print(f"  class {c.id} {c.name}: {int(n)} arms")
    print("All transition rows valid")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    result = replay_run(args.run_dir, out=args.out)
    print(f"Replayed {len(result.records)} episodes")
    if args.out:
        print(f"Results: {args.out}")
    return 0


def _cmd_pareto(args: argparse.Namespace) -> int:
    merged = merge_archives(args.run_dirs)
    rows = [r for r in merged.rows() if args.all or not r[-1]]
    header = ["run", "k", "U", "C", "dominated"]
    if args.out:
        out = Path(args.out)
        with open(out, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
        print(f"Wrote {len(rows)} points to {out}")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return 0


COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "validate-env": _cmd_validate_env,
    "replay": _cmd_replay,
    "pareto": _cmd_pareto,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except (VortexError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
