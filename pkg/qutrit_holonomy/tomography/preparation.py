"""Input-state preparation and analysis rotations for three-level process tomography.

Every preparation and analysis step is a rotation exp(-i angle/2 sigma_axis) on one transition
(0-e or e-1). In ``ideal`` mode the rotations are exact unitaries; in ``pulsed`` mode each one is a
calibrated single-tone Gaussian pulse, propagated under the master equation when a noise model is
given. A pulsed sequence is a train of slots of one pulse length separated by a fixed gap.
"""

import itertools
import logging
from enum import Enum
from functools import cache
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from qutrit_holonomy.core.errors import ReconstructionSingular
from qutrit_holonomy.core.evolution import (
    CollapseSet,
    InteractionHamiltonian,
    NoiseModel,
    lindblad_superoperator,
    propagator,
)
from qutrit_holonomy.core.models import AUX, GROUND, UPPER, DensityMatrix, QutritState
from qutrit_holonomy.core.pulses import (
    DEFAULT_LENGTH,
    DEFAULT_SIGMA,
    DEFAULT_TIME_STEP,
    Axis,
    PulseSpec,
    Transition,
    rotation_pulse,
)
from qutrit_holonomy.core.qutrit import expm_hermitian, ketbra, unitary_superoperator

logger = logging.getLogger(__name__)

RECIPE_TOLERANCE = 1e-10
MAX_RECIPE_PULSES = 3

TRANSITION_LEVELS = {Transition.LOWER: (GROUND, AUX), Transition.UPPER: (AUX, UPPER)}


def transition_pauli(transition: Transition, axis: Axis) -> np.ndarray:
    lower, upper = TRANSITION_LEVELS[transition]
    if axis is Axis.X:
        return ketbra(lower, upper) + ketbra(upper, lower)
    return -1j * ketbra(lower, upper) + 1j * ketbra(upper, lower)


class Rotation(BaseModel):
    """Rotation by ``angle`` about ``axis`` on one transition."""

    model_config = {"frozen": True}

    transition: Transition
    axis: Axis
    angle: float = Field(gt=0, le=np.pi, description="Rotation angle (rad)")

    def __str__(self):
        fraction = "π" if np.isclose(self.angle, np.pi) else f"{self.angle / np.pi:g}π"
        return f"R{self.axis.value}({fraction})@{self.transition.value}"

    def unitary(self) -> np.ndarray:
        return expm_hermitian(transition_pauli(self.transition, self.axis), self.angle / 2)

    def pulse(
        self,
        sigma: float = DEFAULT_SIGMA,
        total_length: float = DEFAULT_LENGTH,
        time_step: float = DEFAULT_TIME_STEP,
    ) -> PulseSpec:
        return rotation_pulse(self.transition, self.axis, self.angle, sigma, total_length, time_step)


X_PI_LOWER = Rotation(transition=Transition.LOWER, axis=Axis.X, angle=np.pi)
X_HALF_LOWER = Rotation(transition=Transition.LOWER, axis=Axis.X, angle=np.pi / 2)
Y_HALF_LOWER = Rotation(transition=Transition.LOWER, axis=Axis.Y, angle=np.pi / 2)
X_PI_UPPER = Rotation(transition=Transition.UPPER, axis=Axis.X, angle=np.pi)
X_HALF_UPPER = Rotation(transition=Transition.UPPER, axis=Axis.X, angle=np.pi / 2)
Y_HALF_UPPER = Rotation(transition=Transition.UPPER, axis=Axis.Y, angle=np.pi / 2)

ROTATIONS: tuple[Rotation, ...] = (X_PI_LOWER, X_HALF_LOWER, Y_HALF_LOWER, X_PI_UPPER, X_HALF_UPPER, Y_HALF_UPPER)

Recipe = tuple[Rotation, ...]


def recipe_unitary(recipe: Sequence[Rotation]) -> np.ndarray:
    u = np.eye(3, dtype=complex)
    for rotation in recipe:
        u = rotation.unitary() @ u
    return u


def matches_up_to_phase(amplitudes: np.ndarray, target: QutritState, tolerance: float = RECIPE_TOLERANCE) -> bool:
    return 1.0 - abs(np.vdot(target.amplitudes, amplitudes)) <= tolerance


def find_recipe(target: QutritState, max_pulses: int = MAX_RECIPE_PULSES) -> Recipe:
    """Shortest rotation sequence taking |0> to ``target`` up to a global phase."""
    ground = QutritState.basis(GROUND).amplitudes
    for length in range(max_pulses + 1):
        for recipe in itertools.product(ROTATIONS, repeat=length):
            if matches_up_to_phase(recipe_unitary(recipe) @ ground, target):
                return tuple(recipe)
    raise ReconstructionSingular(f"No preparation of at most {max_pulses} pulses reaches {target.amplitudes}")


def standard_input_states() -> tuple[QutritState, ...]:
    return (
        QutritState.basis(GROUND),
        QutritState.basis(AUX),
        QutritState.basis(UPPER),
        QutritState.superposition(GROUND, AUX),
        QutritState.superposition(GROUND, AUX, 1j),
        QutritState.superposition(GROUND, UPPER),
        QutritState.superposition(GROUND, UPPER, 1j),
        QutritState.superposition(AUX, UPPER),
        QutritState.superposition(AUX, UPPER, 1j),
    )


class InputStateSet(BaseModel):
    """Nine input states with the rotation recipe preparing each from |0>."""

    model_config = {"frozen": True}

    states: tuple[QutritState, ...]
    recipes: tuple[Recipe, ...]

    @model_validator(mode="after")
    def _consistent(self) -> "InputStateSet":
        if len(self.states) != 9 or len(self.recipes) != 9:
            raise ValueError("exactly nine input states and recipes are required")
        ground = QutritState.basis(GROUND).amplitudes
        for index, (state, recipe) in enumerate(zip(self.states, self.recipes)):
            if not matches_up_to_phase(recipe_unitary(recipe) @ ground, state):
                raise ValueError(f"recipe {[str(r) for r in recipe]} does not prepare input {index}")
        vectors = np.array([state.density().elements.reshape(-1) for state in self.states])
        gram = np.real(vectors.conj() @ vectors.T)
        if np.linalg.matrix_rank(gram) < 9:
            raise ValueError("input states do not span the 3x3 Hermitian matrices")
        return self

    def __len__(self) -> int:
        return len(self.states)


@cache
def input_state_set() -> InputStateSet:
    states = standard_input_states()
    recipes = tuple(find_recipe(state) for state in states)
    for index, recipe in enumerate(recipes):
        logger.debug(f"Input {index}: {' -> '.join(str(r) for r in recipe) or 'identity'}")
    return InputStateSet(states=states, recipes=recipes)


class AnalysisSetting(BaseModel):
    """Rotations applied before the population measurement in the (|0>, |e>, |1>) basis."""

    model_config = {"frozen": True}

    rotations: Recipe = ()

    def __str__(self):
        return " -> ".join(str(r) for r in self.rotations) or "populations"

    def unitary(self) -> np.ndarray:
        return recipe_unitary(self.rotations)


# Populations, both quadratures of each transition, and the 0-1 coherence reached after a pi pulse
# moves one logical level onto |e>.
ANALYSIS_SETTINGS: tuple[AnalysisSetting, ...] = (
    AnalysisSetting(),
    AnalysisSetting(rotations=(Y_HALF_LOWER,)),
    AnalysisSetting(rotations=(X_HALF_LOWER,)),
    AnalysisSetting(rotations=(Y_HALF_UPPER,)),
    AnalysisSetting(rotations=(X_HALF_UPPER,)),
    AnalysisSetting(rotations=(X_PI_UPPER, Y_HALF_LOWER)),
    AnalysisSetting(rotations=(X_PI_UPPER, X_HALF_LOWER)),
    AnalysisSetting(rotations=(X_PI_LOWER, Y_HALF_UPPER)),
    AnalysisSetting(rotations=(X_PI_LOWER, X_HALF_UPPER)),
)


class ModeKind(str, Enum):
    IDEAL = "ideal"
    PULSED = "pulsed"


class TomographyMode(BaseModel):
    """How preparation and analysis rotations are realised."""

    model_config = {"frozen": True}

    kind: ModeKind = ModeKind.IDEAL
    noise: NoiseModel | None = Field(default=None, description="Master-equation noise; None keeps pulses unitary")
    sigma: float = Field(default=DEFAULT_SIGMA, gt=0, description="Pulse width (ns)")
    pulse_length: float = Field(default=DEFAULT_LENGTH, gt=0, description="Pulse slot length (ns)")
    gap: float = Field(default=2.0, ge=0, description="Idle time between consecutive pulses (ns)")
    time_step: float = Field(default=DEFAULT_TIME_STEP, gt=0, description="Unitary integrator step (ns)")
    lindblad_step: float = Field(default=0.02, gt=0, le=1.0, description="Master-equation step (ns)")
    prep_slots: int = Field(default=2, ge=0, description="Pulse slots reserved for preparation")
    analysis_slots: int = Field(default=2, ge=0, description="Pulse slots reserved for analysis")

    @classmethod
    def ideal(cls) -> "TomographyMode":
        return cls()

    @classmethod
    def pulsed(cls, noise: NoiseModel | None = None, **kwargs) -> "TomographyMode":
        return cls(kind=ModeKind.PULSED, noise=noise, **kwargs)

    @property
    def is_ideal(self) -> bool:
        return self.kind is ModeKind.IDEAL

    def sequence_duration(self, slots: int) -> float:
        """Length of ``slots`` pulses with a gap between neighbours (ns)."""
        return slots * self.pulse_length + max(slots - 1, 0) * self.gap

    def typical_sequence_duration(self, gate_slots: int = 1) -> float:
        return self.sequence_duration(self.prep_slots + gate_slots + self.analysis_slots)


def pulse_superoperator(mode: TomographyMode, spec: PulseSpec | None, duration: float | None = None) -> np.ndarray:
    """Transfer matrix of one pulse (or of free evolution when ``spec`` is None) under ``mode``."""
    if mode.noise is None:
        return np.eye(9, dtype=complex) if spec is None else unitary_superoperator(propagator(spec))
    h = None if spec is None else InteractionHamiltonian.from_pulse(spec)
    t_final = spec.duration if spec is not None else duration
    if t_final == 0:
        return np.eye(9, dtype=complex)
    return lindblad_superoperator(h, CollapseSet.from_noise(mode.noise), t_final, mode.lindblad_step)


@cache
def rotation_superoperator(mode: TomographyMode, rotation: Rotation | None) -> np.ndarray:
    """One slot: a rotation pulse, or an idle slot when ``rotation`` is None."""
    if mode.is_ideal:
        return np.eye(9, dtype=complex) if rotation is None else unitary_superoperator(rotation.unitary())
    if rotation is None:
        return pulse_superoperator(mode, None, mode.pulse_length)
    return pulse_superoperator(mode, rotation.pulse(mode.sigma, mode.pulse_length, mode.time_step))


@cache
def gap_superoperator(mode: TomographyMode) -> np.ndarray:
    if mode.is_ideal:
        return np.eye(9, dtype=complex)
    return pulse_superoperator(mode, None, mode.gap)


def schedule_superoperator(mode: TomographyMode, slots: Sequence[Rotation | None]) -> np.ndarray:
    """Slots applied in order with a gap between neighbours."""
    total = np.eye(9, dtype=complex)
    for position, rotation in enumerate(slots):
        if position > 0:
            total = gap_superoperator(mode) @ total
        total = rotation_superoperator(mode, rotation) @ total
    return total


def padded(recipe: Recipe, slots: int) -> tuple[Rotation | None, ...]:
    """Idle slots first so the rotations end right before the next window."""
    return (None,) * max(slots - len(recipe), 0) + tuple(recipe)


def prepare_input(index: int, mode: TomographyMode | None = None) -> DensityMatrix:
    """Input state ``index`` (0..8): exact in ideal mode, otherwise the result of its pulse recipe."""
    inputs = input_state_set()
    if not 0 <= index < len(inputs):
        raise IndexError(f"input index must be in 0..{len(inputs) - 1}, got {index}")
    mode = mode or TomographyMode.ideal()
    if mode.is_ideal:
        return inputs.states[index].density()
    superoperator = schedule_superoperator(mode, padded(inputs.recipes[index], mode.prep_slots))
    ground = QutritState.basis(GROUND).density().elements.reshape(-1)
    return DensityMatrix.trusted((superoperator @ ground).reshape(3, 3))


def analysis_superoperator(setting: AnalysisSetting, mode: TomographyMode) -> np.ndarray:
    if mode.is_ideal:
        return unitary_superoperator(setting.unitary())
    return schedule_superoperator(mode, padded(setting.rotations, mode.analysis_slots))
