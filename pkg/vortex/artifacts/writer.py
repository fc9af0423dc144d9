"""실행 결과 파일 쓰기

    episodes.jsonl  에피소드당 한 줄
    manifest.json   설정 해시, 버전, divergence, λ(해석적 백엔드), 시간
    pareto.csv      k, U, C, dominated
    coverage.csv    k, dimension, level, proportion
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import List, Union

from vortex.artifacts.models import EpisodeRecord, RunResult
from vortex.errors import ArtifactError

logger = logging.getLogger(__name__)

EPISODES_FILE = "episodes.jsonl"
MANIFEST_FILE = "manifest.json"
PARETO_FILE = "pareto.csv"
COVERAGE_FILE = "coverage.csv"


def episode_line(record: EpisodeRecord) -> str:
    """EpisodeRecord → episodes.jsonl 한 줄 (키 정렬, 결정적)"""
    return json.dumps(record.to_dict(), sort_keys=True, ensure_ascii=False)


def write_run(result: RunResult, out_dir: Union[str, Path]) -> List[Path]:
    """실행 결과를 디렉토리에 기록

    Returns:
        기록한 파일 경로 목록

    Raises:
        ArtifactError: 디렉토리 생성이나 쓰기 실패
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ArtifactError(f"cannot create output directory {out_dir}: {e}") from e

    paths = [
        _write(out_dir / EPISODES_FILE, _episodes_text(result)),
        _write(out_dir / MANIFEST_FILE, json.dumps(result.manifest, indent=2, sort_keys=True)),
        _write_csv(out_dir / PARETO_FILE, ["k", "U", "C", "dominated"], _pareto_rows(result)),
        _write_csv(
            out_dir / COVERAGE_FILE,
            ["k", "dimension", "level", "proportion"],
            _coverage_rows(result),
        ),
    ]
    logger.info("wrote %d episodes to %s", len(result.records), out_dir)
    return paths


def _episodes_text(result: RunResult) -> str:
    return "".join(episode_line(r) + "\n" for r in result.records)


def _pareto_rows(result: RunResult) -> List[list]:
    flags = result.archive.dominated_flags()
    return [
        [p.tag, repr(p.U), repr(p.C), int(dominated)]
        for p, dominated in zip(result.archive.points, flags)
    ]


def _coverage_rows(result: RunResult) -> List[list]:
    return [
        [r.k, dim, level, repr(share)]
        for r in result.records
        for dim, levels in r.coverage.items()
        for level, share in levels.items()
    ]


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ArtifactError(f"cannot write {path}: {e}") from e
    return path


def _write_csv(path: Path, header: List[str], rows: List[list]) -> Path:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise ArtifactError(f"cannot write {path}: {e}") from e
    return path
