from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from qutrit_holonomy.core.errors import ConfigError
from qutrit_holonomy.core.evolution import DephasingForm
from qutrit_holonomy.settings import (
    AppConfig,
    GateConfig,
    NoiseConfig,
    get_config,
    load_config,
    logical_state,
    parse_angle,
    setup_logging,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("pi", np.pi),
        ("pi/4", np.pi / 4),
        ("3*pi/8", 3 * np.pi / 8),
        ("-pi/2", -np.pi / 2),
        ("2pi", 2 * np.pi),
        ("π/2", np.pi / 2),
        ("0.25", 0.25),
        (1, 1.0),
    ],
)
def test_parse_angle(text, expected):
    assert parse_angle(text) == pytest.approx(expected)


def test_parse_angle_rejects_text():
    with pytest.raises(ValueError):
        parse_angle("quarter turn")


def test_defaults():
    config = AppConfig()
    assert config.pulse.sigma == 10.0
    assert config.pulse.length == 40.0
    assert config.noise.to_model().t2_e1 == 3.9
    assert config.tomography.shots == 2000
    assert len(config.sweep.thetas) == 9
    assert config.sweep.thetas[-1] == pytest.approx(np.pi / 2)
    assert config.sweep.phi == pytest.approx(np.pi)
    assert [gate.label for gate in config.gates] == ["Z", "H", "NOT"]
    assert config.gate("H").phi == pytest.approx(np.pi)
    assert config.sequence == ["H", "NOT"]


def test_gate_phase_is_wrapped():
    gate = GateConfig(label="U", theta="pi/3", phi="-pi/2")
    assert gate.to_spec().phi == pytest.approx(3 * np.pi / 2)


def test_noise_config():
    assert NoiseConfig(enabled=False).to_model() is None
    assert NoiseConfig().to_model().dephasing is DephasingForm.LEVEL
    assert NoiseConfig(dephasing="ladder").to_model().dephasing is DephasingForm.LADDER
    with pytest.raises(ValidationError):
        NoiseConfig(t2_0e=20.0)


def test_consistency_checks():
    with pytest.raises(ValidationError):
        AppConfig(pulse={"dt": 0.03})
    with pytest.raises(ValidationError):
        AppConfig(sequence=["H", "CNOT"])
    with pytest.raises(ValidationError):
        AppConfig(gates=[{"label": "H", "theta": 0.1}, {"label": "H", "theta": 0.2}], sequence=["H"])
    with pytest.raises(ValidationError):
        AppConfig(sweep={"thetas": ["2*pi"]})


def test_shipped_config_matches_defaults():
    config = load_config(Path(__file__).resolve().parent.parent / "config.yaml")
    defaults = AppConfig()
    assert np.allclose(config.sweep.thetas, defaults.sweep.thetas)
    assert config.model_dump(exclude={"sweep"}) == defaults.model_dump(exclude={"sweep"})


def test_load_config_reads_angles(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("sweep:\n  thetas: [0, pi/2]\nsequence: [NOT]\n", encoding="utf-8")
    config = load_config(path)
    assert config.sweep.thetas == [0.0, pytest.approx(np.pi / 2)]
    assert config.sequence == ["NOT"]


def test_load_config_reports_line_numbers(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("pulse:\n  sigma: -1\n", encoding="utf-8")
    with pytest.raises(ConfigError) as error:
        load_config(path)
    assert any(problem.startswith("pulse.sigma (line 2)") for problem in error.value.problems)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)
    path = tmp_path / "unknown.yaml"
    path.write_text("sequence: [H, CNOT]\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown gates"):
        load_config(path)


def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("# nothing here\n", encoding="utf-8")
    assert load_config(path) == AppConfig()
    assert load_config(None) == AppConfig()


def test_get_config_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "custom.yaml"
    path.write_text("tomography:\n  seed: 99\n", encoding="utf-8")
    monkeypatch.setenv("APP_CONFIG", str(path))
    assert get_config().tomography.seed == 99


def test_get_config_without_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("APP_CONFIG", raising=False)
    assert get_config() == AppConfig()


def test_setup_logging_requires_file(tmp_path):
    config = AppConfig(logging={"config_file": str(tmp_path / "absent.yaml")})
    with pytest.raises(FileNotFoundError):
        setup_logging(config)


def test_logical_state():
    state = logical_state("+i")
    assert np.allclose(state.amplitudes, np.array([1, 0, 1j]) / np.sqrt(2))
    assert state.aux_population == 0.0
