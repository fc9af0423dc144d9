"""RMAB 환경 모듈"""

from vortex.rmab.models import (
    ArmType,
    Environment,
    FeatureClass,
    FeatureDimension,
    PopulationState,
    StepRecord,
    Trajectory,
    TransitionKernel,
)
from vortex.rmab.reader import (
    BUNDLED_SPECS,
    dump_environment,
    load_bundled_environment,
    load_environment,
    load_environment_file,
    resolve_environment,
)
from vortex.rmab.simulator import Policy, rollout, spawn_stream, step, stream_seed

__all__ = [
    "ArmType", "Environment", "FeatureClass", "FeatureDimension",
    "PopulationState", "StepRecord", "Trajectory", "TransitionKernel",
    "BUNDLED_SPECS", "dump_environment", "load_bundled_environment",
    "load_environment", "load_environment_file", "resolve_environment",
    "Policy", "rollout", "spawn_stream", "step", "stream_seed",
]
