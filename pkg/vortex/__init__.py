"""
vortex - LLM 이 제안하는 shaping 보상으로 RMAB 정책을 선호에 맞추는 라이브러리
"""

from vortex.config import RunConfig, load_config
from vortex.core import VortexRunner, replay_run, run_vortex, sweep_lambda

__version__ = "0.1.0"
__all__ = ["RunConfig", "VortexRunner", "load_config", "replay_run", "run_vortex", "sweep_lambda"]
