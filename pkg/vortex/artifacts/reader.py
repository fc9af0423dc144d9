"""실행 결과 파일 읽기와 여러 실행의 파레토 병합"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from vortex.artifacts.models import EpisodeRecord
from vortex.artifacts.writer import EPISODES_FILE, MANIFEST_FILE, PARETO_FILE
from vortex.errors import ArtifactError
from vortex.metrics.pareto import ParetoArchive


def read_episodes(path: Union[str, Path]) -> List[EpisodeRecord]:
    """episodes.jsonl → EpisodeRecord 목록"""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ArtifactError(f"cannot read {path}: {e}") from e

    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(EpisodeRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ArtifactError(f"{path}:{lineno}: malformed episode record: {e}") from e
    return records


def read_manifest(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ArtifactError(f"cannot read manifest {path}: {e}") from e


def read_run(run_dir: Union[str, Path]) -> Tuple[List[EpisodeRecord], Dict[str, Any]]:
    """실행 디렉토리 → (에피소드 기록, manifest)"""
    run_dir = Path(run_dir)
    return read_episodes(run_dir / EPISODES_FILE), read_manifest(run_dir / MANIFEST_FILE)


def read_pareto(path: Union[str, Path]) -> List[Dict[str, str]]:
    """pareto.csv 행 목록"""
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise ArtifactError(f"cannot read {path}: {e}") from e


@dataclass
class MergedArchive:
    """여러 실행을 합친 아카이브 (태그: 실행 이름 / k)"""
    archive: ParetoArchive

    def rows(self) -> List[List[Any]]:
        """run, k, U, C, dominated"""
        flags = self.archive.dominated_flags()
        out = []
        for p, dominated in zip(self.archive.points, flags):
            run, k = p.tag.rsplit("/", 1)
            out.append([run, k, repr(p.U), repr(p.C), int(dominated)])
        return out


def merge_archives(run_dirs: Sequence[Union[str, Path]]) -> MergedArchive:
    """각 실행의 pareto.csv 점을 하나의 아카이브로 병합"""
    archive = ParetoArchive()
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        for row in read_pareto(run_dir / PARETO_FILE):
            try:
                archive.add(float(row["U"]), float(row["C"]), tag=f"{run_dir.name}/{row['k']}")
            except (KeyError, ValueError) as e:
                raise ArtifactError(f"{run_dir / PARETO_FILE}: malformed row {row}: {e}") from e
    return MergedArchive(archive)
