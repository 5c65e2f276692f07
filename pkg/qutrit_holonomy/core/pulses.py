"""Truncated-Gaussian drive envelopes, pulse-area calibration and the (theta, phi) <-> (a, b) drive mapping."""

import logging
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, computed_field, field_validator, model_validator
from scipy.integrate import simpson

from qutrit_holonomy.core.errors import DegenerateEnvelope

logger = logging.getLogger(__name__)

DEFAULT_TIME_STEP = 0.01  # ns
DEFAULT_SIGMA = 10.0  # ns
DEFAULT_LENGTH = 40.0  # ns
FULL_CYCLE = 2 * np.pi
NORM_TOLERANCE = 1e-12


def step_count(length: float, time_step: float) -> int:
    """Number of integrator steps; raises if ``time_step`` does not divide ``length``."""
    if time_step <= 0:
        raise ValueError(f"time step must be positive, got {time_step}")
    steps = int(round(length / time_step))
    if steps < 1 or abs(steps * time_step - length) > 1e-9 * max(length, 1.0):
        raise ValueError(f"time step {time_step} ns does not divide pulse length {length} ns")
    return steps


class GaussianEnvelope(BaseModel):
    """Omega(t) = peak * [exp(-(t - T/2)^2 / 2 sigma^2) - edge] on [0, T], zero outside.

    ``edge`` is exp(-T^2 / 8 sigma^2) when the offset is subtracted (so the pulse starts and
    ends at exactly zero) and 0 for the plain truncated Gaussian.
    """

    model_config = {"frozen": True}

    sigma: float = Field(gt=0, description="Gaussian width (ns)")
    total_length: float = Field(gt=0, description="Pulse length T (ns)")
    peak: float = Field(default=0.0, description="Peak amplitude (rad/ns)")
    offset_subtracted: bool = Field(default=True, description="Subtract the edge value so Omega(0) = Omega(T) = 0")

    @property
    def edge(self) -> float:
        if not self.offset_subtracted:
            return 0.0
        return float(np.exp(-(self.total_length**2) / (8 * self.sigma**2)))

    def scaled(self, factor: float) -> "GaussianEnvelope":
        return self.model_copy(update={"peak": self.peak * factor})


def envelope_value(env: GaussianEnvelope, t: float | np.ndarray) -> float | np.ndarray:
    t = np.asarray(t, dtype=float)
    centre = env.total_length / 2
    inside = (t >= 0.0) & (t <= env.total_length)
    shape = np.exp(-((t - centre) ** 2) / (2 * env.sigma**2)) - env.edge
    value = np.where(inside, env.peak * shape, 0.0)
    return float(value) if value.ndim == 0 else value


def pulse_area(env: GaussianEnvelope, time_step: float = DEFAULT_TIME_STEP) -> float:
    """Integral of Omega over [0, T] by composite Simpson with panels of width ``time_step``.

    Each panel uses the panel ends and midpoint, the same samples the propagator averages per step,
    so a calibrated envelope yields exactly the rotation the integrator applies.
    """
    steps = step_count(env.total_length, time_step)
    grid = np.linspace(0.0, env.total_length, 2 * steps + 1)
    return float(simpson(envelope_value(env, grid), x=grid))


def calibrate_peak(
    sigma: float,
    total_length: float,
    time_step: float = DEFAULT_TIME_STEP,
    target_area: float = FULL_CYCLE,
    offset_subtracted: bool = True,
) -> GaussianEnvelope:
    """Envelope whose pulse area equals ``target_area`` (2 pi closes the cyclic evolution)."""
    if sigma <= 0 or total_length <= 0:
        raise DegenerateEnvelope(f"Envelope needs sigma > 0 and length > 0, got sigma={sigma}, length={total_length}")
    unit = GaussianEnvelope(sigma=sigma, total_length=total_length, peak=1.0, offset_subtracted=offset_subtracted)
    unit_area = pulse_area(unit, time_step)
    if not np.isfinite(unit_area) or unit_area <= 1e-12 * total_length:
        raise DegenerateEnvelope(
            f"Envelope (sigma={sigma} ns, length={total_length} ns) has no positive area to calibrate"
        )
    envelope = unit.scaled(target_area / unit_area)
    logger.debug(f"Calibrated envelope sigma={sigma} length={total_length}: peak={envelope.peak:.12f} rad/ns")
    return envelope


class DriveConfig(BaseModel):
    """Normalised complex amplitudes of the two tones, a on |0>-|e> and b on |e>-|1>."""

    model_config = {"frozen": True}

    a: complex = Field(description="Amplitude on the |0> <-> |e> transition")
    b: complex = Field(description="Amplitude on the |e> <-> |1> transition")

    @field_validator("a", "b", mode="before")
    @classmethod
    def _to_complex(cls, value: Any) -> complex:
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return complex(value[0], value[1])
        return complex(value)

    @model_validator(mode="after")
    def _normalised(self) -> "DriveConfig":
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
        return self

    @computed_field
    @property
    def theta(self) -> float:
        return angles_from_drive(self)[0]

    @computed_field
    @property
    def phi(self) -> float:
        return angles_from_drive(self)[1]


def drive_from_angles(theta: float, phi: float) -> DriveConfig:
    """a = e^{i phi} sin(theta/2), b = cos(theta/2); b is real and nonnegative."""
    return DriveConfig(a=np.exp(1j * phi) * np.sin(theta / 2), b=np.cos(theta / 2))


def angles_from_drive(drive: DriveConfig) -> tuple[float, float]:
    theta = 2 * float(np.arctan2(abs(drive.a), abs(drive.b)))
    if abs(drive.a) == 0.0 or abs(drive.b) == 0.0:
        phase = float(np.angle(drive.a)) if abs(drive.a) > 0 else 0.0
    else:
        phase = float(np.angle(drive.a / drive.b))
    return theta, phase % FULL_CYCLE


class PulseSpec(BaseModel):
    """Envelope, drive pair and integrator step of one pulse."""

    model_config = {"frozen": True}

    envelope: GaussianEnvelope
    drive: DriveConfig
    time_step: float = Field(default=DEFAULT_TIME_STEP, gt=0, description="Integrator step (ns)")

    @model_validator(mode="after")
    def _step_divides_length(self) -> "PulseSpec":
        step_count(self.envelope.total_length, self.time_step)
        return self

    @property
    def steps(self) -> int:
        return step_count(self.envelope.total_length, self.time_step)

    @property
    def duration(self) -> float:
        return self.envelope.total_length

    @property
    def area(self) -> float:
        return pulse_area(self.envelope, self.time_step)

    def is_calibrated(self, target_area: float = FULL_CYCLE, rtol: float = 1e-9) -> bool:
        return abs(self.area - target_area) <= rtol * abs(target_area)

    def with_time_step(self, time_step: float) -> "PulseSpec":
        return self.model_copy(update={"time_step": time_step})


def calibrated_pulse(
    drive: DriveConfig,
    sigma: float = DEFAULT_SIGMA,
    total_length: float = DEFAULT_LENGTH,
    time_step: float = DEFAULT_TIME_STEP,
    area: float = FULL_CYCLE,
) -> PulseSpec:
    envelope = calibrate_peak(sigma, total_length, time_step, target_area=area)
    return PulseSpec(envelope=envelope, drive=drive, time_step=time_step)


class Transition(str, Enum):
    """Single transitions addressed by preparation and analysis pulses (lower level first)."""

    LOWER = "0e"
    UPPER = "e1"


class Axis(str, Enum):
    X = "x"
    Y = "y"


def rotation_drive(transition: Transition, axis: Axis) -> DriveConfig:
    """Single-tone drive whose pulse of area alpha is exp(-i alpha/2 sigma_axis) on the transition pair.

    For the upper pair the drive enters as b|e><1|, with |e> the lower level, so the y phase is -i.
    """
    if transition is Transition.LOWER:
        return DriveConfig(a=1.0 if axis is Axis.X else 1j, b=0.0)
    return DriveConfig(a=0.0, b=1.0 if axis is Axis.X else -1j)


def rotation_pulse(
    transition: Transition,
    axis: Axis,
    angle: float,
    sigma: float = DEFAULT_SIGMA,
    total_length: float = DEFAULT_LENGTH,
    time_step: float = DEFAULT_TIME_STEP,
) -> PulseSpec:
    return calibrated_pulse(rotation_drive(transition, axis), sigma, total_length, time_step, area=angle)
