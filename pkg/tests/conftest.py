from pathlib import Path

import numpy as np
import pytest
import yaml

from qutrit_holonomy.settings import get_config

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_density(rng):
    def make(rank: int = 3) -> np.ndarray:
        g = rng.normal(size=(3, rank)) + 1j * rng.normal(size=(3, rank))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real

    return make


@pytest.fixture
def write_config(tmp_path, monkeypatch):
    """Write a YAML config under tmp_path and run from there, so logs and results stay inside it."""
    monkeypatch.chdir(tmp_path)

    def write(sections: dict | None = None, name: str = "config.yaml") -> Path:
        document = {
            "execution": {"output_dir": "results", "logs_dir": "logs"},
            "logging": {"config_file": str(REPO_ROOT / "logging_config.yaml")},
        }
        for key, value in (sections or {}).items():
            document.setdefault(key, {})
            if isinstance(value, dict):
                document[key].update(value)
            else:
                document[key] = value
        path = tmp_path / name
        path.write_text(yaml.safe_dump(document), encoding="utf-8")
        return path

    return write


@pytest.fixture(autouse=True)
def fresh_config_cache():
    get_config.cache_clear()
    yield
    get_config.cache_clear()
