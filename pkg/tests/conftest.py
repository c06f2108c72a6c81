"""Pytest configuration and fixtures."""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from cptalloc.core.instances import example1_instance, example2_instance
from cptalloc.models import (
    AgentSpec,
    ExplicitWeights,
    IntArray,
    NetworkInstance,
    ValueFunctionSpec,
    WeightingFunctionSpec,
)


@pytest.fixture
def example1() -> NetworkInstance:
    """Ten power/kt players on one link of capacity 10, k = 10."""
    return example1_instance()


@pytest.fixture
def example2() -> NetworkInstance:
    """Two explicit-weight players on one link of capacity 2.9, k = 2."""
    return example2_instance()


@pytest.fixture
def anti_aligned() -> IntArray:
    """Profile where the two players rank the outcomes oppositely."""
    return np.array([[0, 1], [1, 0]], dtype=np.int64)


@pytest.fixture
def kt_agent() -> AgentSpec:
    """Power value with kt weighting, the usual experimental parameters."""
    return AgentSpec(
        value=ValueFunctionSpec.power(0.88),
        weights=WeightingFunctionSpec.kt(0.61),
    )


@pytest.fixture
def log_agent() -> AgentSpec:
    """Strictly concave log value with identity weighting."""
    return AgentSpec(
        value=ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.1),
        weights=WeightingFunctionSpec.identity(),
    )


@pytest.fixture
def linear_agent() -> AgentSpec:
    """Linear value with identity weighting."""
    return AgentSpec(
        value=ValueFunctionSpec.linear(),
        weights=WeightingFunctionSpec.identity(),
    )


@pytest.fixture
def single_link_instance(log_agent: AgentSpec) -> NetworkInstance:
    """Two log-utility players sharing one link of capacity 2, k = 1."""
    return NetworkInstance(
        capacities=[2.0],
        routes=[[0], [0]],
        k=1,
        agents=[log_agent, log_agent],
    )


@pytest.fixture
def identity_instance() -> NetworkInstance:
    """Two identity-weighting log players on two links, k = 2."""
    return NetworkInstance(
        capacities=[2.0, 1.5],
        routes=[[0], [0, 1]],
        k=2,
        agents=[
            AgentSpec(
                value=ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.2),
                weights=WeightingFunctionSpec.identity(),
            ),
            AgentSpec(
                value=ValueFunctionSpec.log_affine(a=2.0, b=0.0, s=0.5),
                weights=WeightingFunctionSpec.identity(),
            ),
        ],
    )


@pytest.fixture
def solo_instance() -> NetworkInstance:
    """One kt player on two links, k = 2."""
    return NetworkInstance(
        capacities=[3.0, 2.0],
        routes=[[0, 1]],
        k=2,
        agents=[
            AgentSpec(
                value=ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.2),
                weights=WeightingFunctionSpec.kt(0.61),
            )
        ],
    )


@pytest.fixture
def explicit_agent() -> AgentSpec:
    """Linear value with explicit weights for two outcomes."""
    return AgentSpec(
        value=ValueFunctionSpec.linear(),
        weights=ExplicitWeights(explicit_h=[0.9, 0.1]),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(20240601)


@pytest.fixture
def example2_json(example2: NetworkInstance) -> dict[str, Any]:
    """JSON form of the two-player instance."""
    return example2.to_json()


@pytest.fixture
def instance_file(tmp_path: Path, example2_json: dict[str, Any]) -> Path:
    """Write the two-player instance to a temporary file."""
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(example2_json))
    return path


@pytest.fixture
def malformed_instance_file(tmp_path: Path) -> Path:
    """Instance file with an empty route and a negative capacity."""
    path = tmp_path / "malformed.json"
    data = {
        "capacities": [-1.0],
        "routes": [[0], []],
        "k": 2,
        "agents": [
            {"value": {"family": "linear"}, "weights": {"family": "identity"}},
            {"value": {"family": "linear"}, "weights": {"family": "identity"}},
        ],
    }
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def output_dir(tmp_path: Path) -> Path:
    """Directory receiving CLI artifacts."""
    return tmp_path / "results"


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Keep CPTALLOC_* variables and a stray .env out of every test."""
    for name in ("SEED", "WORKERS", "KKT_TOL", "OUTPUT_DIR", "LOG_LEVEL"):
        monkeypatch.delenv(f"CPTALLOC_{name}", raising=False)
    monkeypatch.chdir(tmp_path)
