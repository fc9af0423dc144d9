"""공통 픽스처: 작은 환경, 선호"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pytest

from vortex.metrics.preference import compile_directive, preference_from_target
from vortex.rmab.models import Environment
from vortex.rmab.reader import dump_environment, load_bundled_environment, load_environment

STAY = {"s0_a0": [1.0, 0.0], "s0_a1": [1.0, 0.0], "s1_a0": [0.0, 1.0], "s1_a1": [0.0, 1.0]}
ACT_UP = {"s0_a0": [1.0, 0.0], "s0_a1": [0.0, 1.0], "s1_a0": [1.0, 0.0], "s1_a1": [0.0, 1.0]}


def make_type(
    type_id: int,
    group: str,
    transitions: Dict[str, List[float]],
    count: int = 1,
    base=(0.2, 0.8),
    initial_state: int = 0,
) -> Dict:
    return {
        "id": type_id,
        "features": {"group": group},
        "count": count,
        "base_reward": {"0": base[0], "1": base[1]},
        "transitions": {key: list(row) for key, row in transitions.items()},
        "initial_state": initial_state,
    }


def make_spec(types: List[Dict], B: int, T: int, name: str = "tiny") -> Dict:
    return {
        "name": name,
        "N": sum(t["count"] for t in types),
        "B": B,
        "T": T,
        "features": [{"name": "group", "levels": ["A", "B"]}],
        "aliases": {"GA": {"group": "A"}, "GB": {"group": "B"}},
        "types": types,
    }


def build_env(spec: Dict) -> Environment:
    return load_environment(json.dumps(spec))


def deterministic_spec() -> Dict:
    """acting 으로만 상태 1 이 되는 A arm 하나와 상태가 고정된 B arm 하나"""
    return make_spec(
        [make_type(1, "A", ACT_UP), make_type(2, "B", STAY)],
        B=1,
        T=2,
        name="deterministic",
    )


def random_tiny_environment(
    rng: np.random.Generator,
    max_arms: int = 4,
    max_budget: int = 2,
    max_horizon: int = 3,
    horizon: Optional[int] = None,
) -> Environment:
    """무작위 커널의 작은 인스턴스 (arm 마다 타입 하나)"""
    N = int(rng.integers(2, max_arms + 1))
    B = int(rng.integers(1, min(max_budget, N) + 1))
    T = horizon or int(rng.integers(1, max_horizon + 1))
    types = []
    for i in range(N):
        p_up = rng.uniform(0.05, 0.95, size=(2, 2))
        transitions = {
            f"s{s}_a{a}": [1.0 - float(p_up[s, a]), float(p_up[s, a])]
            for s in (0, 1)
            for a in (0, 1)
        }
        base = (float(rng.uniform(0.0, 0.5)), float(rng.uniform(0.5, 1.0)))
        types.append(
            make_type(
                i + 1,
                "A" if i % 2 == 0 else "B",
                transitions,
                base=base,
                initial_state=int(rng.integers(0, 2)),
            )
        )
    return build_env(make_spec(types, B=B, T=T, name=f"random-{N}-{B}-{T}"))


@pytest.fixture
def det_env() -> Environment:
    return build_env(deterministic_spec())


@pytest.fixture
def det_env_file(tmp_path: Path, det_env: Environment) -> Path:
    path = tmp_path / "deterministic.json"
    path.write_text(dump_environment(det_env), encoding="utf-8")
    return path


@pytest.fixture
def half_pref(det_env: Environment):
    """두 클래스에 반씩"""
    return preference_from_target([0.5, 0.5], det_env, kind="kl", directive_text="balance")


@pytest.fixture
def stochastic_env() -> Environment:
    """A 타입 두 개, B 타입 두 개 (확률적 커널)"""
    a = {"s0_a0": [0.9, 0.1], "s0_a1": [0.3, 0.7], "s1_a0": [0.5, 0.5], "s1_a1": [0.1, 0.9]}
    b = {"s0_a0": [0.8, 0.2], "s0_a1": [0.6, 0.4], "s1_a0": [0.4, 0.6], "s1_a1": [0.2, 0.8]}
    return build_env(
        make_spec(
            [make_type(1, "A", a, count=2), make_type(2, "B", b, count=2)],
            B=2,
            T=10,
            name="stochastic",
        )
    )


@pytest.fixture
def armman_pref():
    env = load_bundled_environment("armman")
    return env, compile_directive("favor LI", env, rho=0.75)
