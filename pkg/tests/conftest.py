from __future__ import annotations

import json
from pathlib import Path

from levy_toolbox.model import presets

import pytest

TESTS_DIR: Path = Path(__file__).parent
REPO_ROOT: Path = TESTS_DIR.parent


@pytest.fixture
def smooth_model():
    return presets.smooth_test_model()


@pytest.fixture
def cauchy_model():
    return presets.constant_cauchy_model()


@pytest.fixture
def constant_skewed_model():
    return presets.constant_model(alpha=1.5, lam=1.0, rho=0.3, b=0.5)


@pytest.fixture
def point_mass_model():
    return presets.point_mass_example()


@pytest.fixture
def density_nu_model():
    return presets.density_nu_example()


@pytest.fixture
def configs_dir() -> Path:
    return REPO_ROOT / "configs"


@pytest.fixture(scope="session")
def stable_lattice() -> list[dict[str, float]]:
    with open(TESTS_DIR / "fixtures" / "stable_lattice.json") as f:
        return json.load(f)["params"]


@pytest.fixture
def write_json(tmp_path):
    """Write a mapping as JSON under `tmp_path` and return the path."""

    def _write(name: str, payload: dict) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload, indent=2))

        return path

    return _write
