"""실행 결과 기록/읽기"""

from vortex.artifacts.models import EpisodeRecord, RunResult
from vortex.artifacts.reader import merge_archives, read_episodes, read_manifest, read_run
from vortex.artifacts.writer import episode_line, write_run

__all__ = [
    "EpisodeRecord", "RunResult",
    "merge_archives", "read_episodes", "read_manifest", "read_run",
    "episode_line", "write_run",
]
