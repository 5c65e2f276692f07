"""Application settings module using Pydantic and EnvYAML.

Loads the experiment configuration from a YAML file with environment variables support. Every
section has defaults equal to the device values of the experiment, so an empty file (or no file)
reproduces it.
"""

import logging
import logging.config
import os
import re
from functools import cache
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
import yaml
from envyaml import EnvYAML
from pydantic import BaseModel, BeforeValidator, Field, ValidationError, field_validator, model_validator

from qutrit_holonomy.core.errors import ConfigError
from qutrit_holonomy.core.evolution import DephasingForm, NoiseModel
from qutrit_holonomy.core.models import GROUND, UPPER, GateSpec, QutritState

DEFAULT_CONFIG_FILE = "config.yaml"

_ANGLE_PATTERN = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(value: Any) -> float:
    """Angle in radians from a number or an expression such as "pi", "pi/4", "3*pi/8", "-pi/2"."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"angle must be a number or a multiple of pi, got {value!r}")
    match = _ANGLE_PATTERN.match(value.lower().replace("π", "pi"))
    if match is None:
        try:
            return float(value)
        except ValueError:
            raise ValueError(f"cannot read {value!r} as an angle") from None
    factor, divisor = match.groups()
    if factor in ("", "+"):
        factor = 1.0
    elif factor == "-":
        factor = -1.0
    return float(factor) * np.pi / (float(divisor) if divisor else 1.0)


Angle = Annotated[float, BeforeValidator(parse_angle)]


class PulseConfig(BaseModel):
    """Gate and rotation pulse settings."""

    sigma: float = Field(default=10.0, gt=0, description="Gaussian width (ns)")
    length: float = Field(default=40.0, gt=0, description="Truncated pulse length (ns)")
    dt: float = Field(default=0.01, gt=0, description="Integrator and quadrature step (ns)")
    lindblad_dt: float = Field(default=0.02, gt=0, le=1.0, description="Master-equation step (ns)")
    gap: float = Field(default=2.0, ge=0, description="Idle time between consecutive pulses (ns)")


class NoiseConfig(BaseModel):
    """Relaxation and dephasing settings."""

    t1: float = Field(default=7.0, gt=0, description="Relaxation time of both excited states (us)")
    t2_0e: float = Field(default=8.0, gt=0, description="Ramsey time of the |0>-|e> transition (us)")
    t2_e1: float = Field(default=3.9, gt=0, description="Ramsey time of the |e>-|1> transition (us)")
    dephasing: DephasingForm = Field(default=DephasingForm.LEVEL, description="Form of the dephasing operators")
    enabled: bool = Field(default=True, description="Simulate with the master equation")

    @model_validator(mode="after")
    def _realisable(self) -> "NoiseConfig":
        try:
            self.to_model()
        except ValidationError as e:
            raise ValueError("; ".join(error["msg"] for error in e.errors())) from None
        return self

    def to_model(self) -> NoiseModel | None:
        if not self.enabled:
            return None
        return NoiseModel(t1=self.t1, t2_0e=self.t2_0e, t2_e1=self.t2_e1, dephasing=self.dephasing)


class TomographyConfig(BaseModel):
    """Process tomography settings."""

    shots: int | None = Field(default=2000, gt=0, description="Shots per setting; null for exact probabilities")
    seed: int = Field(default=1234, description="Seed of the shot sampler")
    mle_max_iterations: int = Field(default=100_000, gt=0, description="Iteration cap of the likelihood fit")
    mle_tolerance: float = Field(default=1e-10, gt=0, description="Relative log-likelihood change to stop at")
    prep_slots: int = Field(default=2, ge=0, description="Pulse slots reserved for input preparation")
    analysis_slots: int = Field(default=2, ge=0, description="Pulse slots reserved for analysis rotations")


class SweepConfig(BaseModel):
    """Mixing-angle sweep settings."""

    thetas: list[Angle] = Field(
        default_factory=lambda: [float(t) for t in np.linspace(0.0, np.pi / 2, 9)],
        min_length=1,
        description="Mixing angles (rad) in [0, pi]",
    )
    phi: Angle = Field(default=np.pi, description="Gate phase (rad)")

    @field_validator("thetas")
    @classmethod
    def _in_range(cls, value: list[float]) -> list[float]:
        outside = [t for t in value if not 0.0 <= t <= np.pi]
        if outside:
            raise ValueError(f"mixing angles must lie in [0, pi], got {outside}")
        return value


class GateConfig(BaseModel):
    """A named holonomic gate."""

    label: str = Field(min_length=1, description="Gate name used in sequences")
    theta: Angle = Field(ge=0.0, le=np.pi, description="Mixing angle (rad)")
    phi: Angle = Field(default=0.0, description="Gate phase (rad), taken modulo 2 pi")

    def to_spec(self) -> GateSpec:
        return GateSpec(theta=self.theta, phi=self.phi % (2 * np.pi), label=self.label)


def _default_gates() -> list[GateConfig]:
    return [
        GateConfig(label="Z", theta=0.0, phi=0.0),
        GateConfig(label="H", theta=np.pi / 4, phi=np.pi),
        GateConfig(label="NOT", theta=np.pi / 2, phi=0.0),
    ]


BLOCH_STATES: dict[str, tuple[complex, complex]] = {
    "0": (1.0, 0.0),
    "1": (0.0, 1.0),
    "+": (1.0, 1.0),
    "-": (1.0, -1.0),
    "+i": (1.0, 1j),
    "-i": (1.0, -1j),
}


def logical_state(label: str) -> QutritState:
    """Logical-subspace state named by its Bloch-sphere label."""
    alpha, beta = BLOCH_STATES[label]
    amplitudes = np.zeros(3, dtype=complex)
    amplitudes[GROUND], amplitudes[UPPER] = alpha, beta
    return QutritState.normalized(amplitudes)


class BlochConfig(BaseModel):
    """Bloch trajectory export settings."""

    initial: Literal["0", "1", "+", "-", "+i", "-i"] = Field(default="0", description="Initial logical state")
    sample_every: int = Field(default=10, gt=0, description="Write every n-th integrator step")


class ExecutionConfig(BaseModel):
    """Application execution settings."""

    output_dir: str = Field(default="results", description="Directory for tables, matrices and run logs")
    logs_dir: str = Field(default="logs", description="Directory for log files")
    max_workers: int = Field(default=1, gt=0, description="Sweep points evaluated concurrently")


class LoggingConfig(BaseModel):
    """Logging configuration settings."""

    config_file: str = Field(default="logging_config.yaml", description="Logging configuration file path")


class AppConfig(BaseModel):
    """Main application configuration."""

    pulse: PulseConfig = Field(default_factory=PulseConfig, description="Pulse settings")
    noise: NoiseConfig = Field(default_factory=NoiseConfig, description="Noise settings")
    tomography: TomographyConfig = Field(default_factory=TomographyConfig, description="Tomography settings")
    sweep: SweepConfig = Field(default_factory=SweepConfig, description="Sweep settings")
    gates: list[GateConfig] = Field(default_factory=_default_gates, description="Named gates")
    sequence: list[str] = Field(default_factory=lambda: ["H", "NOT"], description="Gate labels applied in order")
    bloch: BlochConfig = Field(default_factory=BlochConfig, description="Bloch export settings")
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig, description="Execution settings")
    logging: LoggingConfig = Field(default_factory=LoggingConfig, description="Logging settings")

    @model_validator(mode="after")
    def _consistent(self) -> "AppConfig":
        labels = [gate.label for gate in self.gates]
        if len(set(labels)) != len(labels):
            raise ValueError(f"gate labels must be unique, got {labels}")
        steps = self.pulse.length / self.pulse.dt
        if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0):
            raise ValueError("pulse.dt must divide pulse.length")
        unknown = [label for label in self.sequence if label not in labels]
        if unknown:
            raise ValueError(f"sequence names unknown gates {unknown}")
        return self

    def gate(self, label: str) -> GateSpec:
        for gate in self.gates:
            if gate.label == label:
                return gate.to_spec()
        raise KeyError(label)


ExperimentConfig = AppConfig


def _node_line(node: yaml.Node | None, path: tuple[Any, ...]) -> int | None:
    """1-based line of the YAML node at ``path``, or of its deepest present ancestor."""
    if node is None:
        return None
    for key in path:
        child = None
        if isinstance(node, yaml.MappingNode):
            child = next((value for name, value in node.value if name.value == str(key)), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            child = node.value[key]
        if child is None:
            break
        node = child
    return node.start_mark.line + 1


def _describe(error: ValidationError, text: str) -> list[str]:
    root = yaml.compose(text) if text.strip() else None
    problems = []
    for item in error.errors():
        location = tuple(item["loc"])
        field = ".".join(str(part) for part in location) or "<root>"
        line = _node_line(root, location) if location else None
        where = f" (line {line})" if line is not None else ""
        problems.append(f"{field}{where}: {item['msg']}")
    return problems


def load_config(path: str | Path | None = None) -> AppConfig:
    """Validated configuration from ``path``; ``None`` gives the defaults."""
    if path is None:
        return AppConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        document = yaml.safe_load(text)
        if document is not None and not isinstance(document, dict):
            raise ConfigError(f"Config file {path} must hold a mapping of sections")
        data = dict(EnvYAML(str(path))) if document else {}
    except (yaml.YAMLError, ValueError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    try:
        return AppConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config file {path}", _describe(e, text)) from e


@cache
def get_config() -> AppConfig:
    app_config_env: str = os.environ.get("APP_CONFIG", DEFAULT_CONFIG_FILE)

    # If path has no directory part, assume it's in current working directory
    if os.path.basename(app_config_env) == app_config_env:
        app_config_path = Path.cwd() / app_config_env
    else:
        app_config_path = Path(app_config_env)

    if not app_config_path.exists() and app_config_env == DEFAULT_CONFIG_FILE:
        return AppConfig()
    return load_config(app_config_path)


def setup_logging(config: AppConfig | None = None) -> None:
    """Setup logging configuration from YAML file."""
    config = config or get_config()
    logging_config_path = Path(config.logging.config_file)
    if not logging_config_path.exists():
        raise FileNotFoundError(f"Logging config file not found: {logging_config_path}")

    with open(logging_config_path, "r", encoding="utf-8") as f:
        logging_config = yaml.safe_load(f)

    logs_dir = Path(config.execution.logs_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)
    # file handlers keep their file name but write under execution.logs_dir
    for handler in logging_config.get("handlers", {}).values():
        if "filename" in handler:
            handler["filename"] = str(logs_dir / Path(handler["filename"]).name)

    logging.config.dictConfig(logging_config)
