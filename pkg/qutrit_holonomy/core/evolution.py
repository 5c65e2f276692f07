"""Time evolution under the two-tone interaction Hamiltonian.

h(t) = Omega(t)/2 (a|e><0| + b|e><1| + h.c.), hbar = 1, times in ns. The unitary path multiplies
exponentials of the Simpson-averaged Hamiltonian of every step; the dissipative path integrates the
Lindblad equation with classical RK4 on the row-major vectorised density matrix (or on the whole
9x9 transfer matrix).
"""

import logging
from enum import Enum
from typing import Any, Callable

import numpy as np
from pydantic import BaseModel, Field, computed_field, field_validator, model_validator

from qutrit_holonomy.core.errors import NonUnitaryResult, StepTooCoarse
from qutrit_holonomy.core.models import (
    AUX,
    GROUND,
    LOGICAL_LEVELS,
    UPPER,
    DensityMatrix,
    frozen_array,
    unitary_deviation,
)
from qutrit_holonomy.core.pulses import (
    DriveConfig,
    GaussianEnvelope,
    PulseSpec,
    drive_from_angles,
    envelope_value,
    step_count,
)
from qutrit_holonomy.core.qutrit import dagger, expm_hermitian, ketbra, vec

logger = logging.getLogger(__name__)

NS_PER_US = 1000.0
UNITARITY_TOLERANCE = 1e-8
TRACE_DRIFT_LIMIT = 1e-6
POSITIVITY_FLOOR = -1e-7
MAX_LINDBLAD_STEP = 1.0  # ns


def drive_matrix(drive: DriveConfig) -> np.ndarray:
    """a|e><0| + b|e><1| + h.c.; annihilates the dark state b|0> - a|1>."""
    m = drive.a * ketbra(AUX, GROUND) + drive.b * ketbra(AUX, UPPER)
    return m + dagger(m)


class RatioRamp(BaseModel):
    """Diagnostic drive whose mixing angle sweeps linearly over the pulse, breaking constant a/b."""

    model_config = {"frozen": True}

    theta_start: float = Field(ge=0.0, le=np.pi)
    theta_end: float = Field(ge=0.0, le=np.pi)
    phi: float = Field(default=0.0)

    def drive_at(self, fraction: float) -> DriveConfig:
        fraction = min(max(fraction, 0.0), 1.0)
        return drive_from_angles(self.theta_start + (self.theta_end - self.theta_start) * fraction, self.phi)


class InteractionHamiltonian(BaseModel):
    model_config = {"frozen": True}

    drive: DriveConfig
    envelope: GaussianEnvelope
    ramp: RatioRamp | None = Field(default=None, description="Replace the fixed drive pair by a swept one")

    @classmethod
    def from_pulse(cls, spec: PulseSpec, ramp: RatioRamp | None = None) -> "InteractionHamiltonian":
        return cls(drive=spec.drive, envelope=spec.envelope, ramp=ramp)

    def drive_at(self, t: float) -> DriveConfig:
        if self.ramp is None:
            return self.drive
        return self.ramp.drive_at(t / self.envelope.total_length)


def hamiltonian_at(h: InteractionHamiltonian, t: float) -> np.ndarray:
    return 0.5 * envelope_value(h.envelope, t) * drive_matrix(h.drive_at(t))


def _step_hamiltonians(h: InteractionHamiltonian, time_step: float, steps: int) -> np.ndarray:
    """Simpson average (h(t) + 4 h(t + dt/2) + h(t + dt)) / 6 over each step, shape (steps, 3, 3)."""
    starts = np.arange(steps) * time_step
    if h.ramp is None:
        weights = (
            envelope_value(h.envelope, starts)
            + 4 * envelope_value(h.envelope, starts + time_step / 2)
            + envelope_value(h.envelope, starts + time_step)
        ) / 6
        return 0.5 * weights[:, None, None] * drive_matrix(h.drive)[None, :, :]
    return np.array(
        [
            (
                hamiltonian_at(h, t)
                + 4 * hamiltonian_at(h, t + time_step / 2)
                + hamiltonian_at(h, t + time_step)
            )
            / 6
            for t in starts
        ]
    )


def propagator_path(
    h: InteractionHamiltonian,
    time_step: float,
    t_final: float | None = None,
) -> np.ndarray:
    """U(t_k) at every step boundary t_k = k * dt, shape (steps + 1, 3, 3); U(0) = I."""
    t_final = h.envelope.total_length if t_final is None else t_final
    steps = step_count(t_final, time_step)
    step_unitaries = expm_hermitian(_step_hamiltonians(h, time_step, steps), time_step)
    path = np.empty((steps + 1, 3, 3), dtype=complex)
    path[0] = np.eye(3)
    for k in range(steps):
        path[k + 1] = step_unitaries[k] @ path[k]
    return path


def time_ordered_propagator(h: InteractionHamiltonian, time_step: float, t_final: float | None = None) -> np.ndarray:
    t_final = h.envelope.total_length if t_final is None else t_final
    steps = step_count(t_final, time_step)
    u = np.eye(3, dtype=complex)
    for step_unitary in expm_hermitian(_step_hamiltonians(h, time_step, steps), time_step):
        u = step_unitary @ u
    deviation = unitary_deviation(u)
    if deviation > UNITARITY_TOLERANCE:
        raise NonUnitaryResult(deviation, time_step)
    return u


def propagator(spec: PulseSpec) -> np.ndarray:
    """Time-ordered product T exp(-i int_0^T h(t) dt) of the pulse."""
    u = time_ordered_propagator(InteractionHamiltonian.from_pulse(spec), spec.time_step)
    logger.debug(f"Propagated {spec.steps} steps of {spec.time_step} ns (area {spec.area:.12f})")
    return u


def closed_form_propagator(spec: PulseSpec) -> np.ndarray:
    """exp(-i (area/2) M) for a fixed drive pair, where h(t) = Omega(t)/2 M commute at all times."""
    return expm_hermitian(drive_matrix(spec.drive), spec.area / 2)


def parallel_transport_residual(spec: PulseSpec, samples: int, ramp: RatioRamp | None = None) -> float:
    """max over sampled t and i, j in {0, 1} of |<psi_i(t)| h(t) |psi_j(t)>|, psi_i(t) = U(t)|i>."""
    if samples < 2:
        raise ValueError(f"need at least two samples, got {samples}")
    h = InteractionHamiltonian.from_pulse(spec, ramp)
    path = propagator_path(h, spec.time_step)
    indices = np.unique(np.round(np.linspace(0, spec.steps, samples)).astype(int))
    residual = 0.0
    for k in indices:
        psi = path[k][:, LOGICAL_LEVELS]
        projected = dagger(psi) @ hamiltonian_at(h, k * spec.time_step) @ psi
        residual = max(residual, float(np.max(np.abs(projected))))
    return residual


class DephasingForm(str, Enum):
    """Diagonal operators that carry the pure dephasing."""

    LEVEL = "level"  # |e><e| and |1><1|, independent energy noise of each excited level
    LADDER = "ladder"  # |e><e| - |0><0| and |1><1| - |e><e|, one channel per transition


class NoiseModel(BaseModel):
    """Relaxation and dephasing of the ladder from T1 and the Ramsey T2 of each transition (times in us).

    Both excited states decay at 1/T1. The pure-dephasing rate each transition needs is the Ramsey
    rate minus the relaxation-induced part: 1/(2 T1) for 0-e, where only |e> decays, and 1/T1 for
    e-1, where both levels decay. A diagonal operator L = sum_i l_i |i><i| at rate r damps the
    (i, j) coherence at r |l_i - l_j|^2 / 2, so both forms solve for rates that reproduce the two
    Ramsey times exactly:

        level:   r_e / 2 = gamma_0e,                (r_e + r_1) / 2 = gamma_e1
        ladder:  2 r_a + r_b / 2 = gamma_0e,        r_a / 2 + 2 r_b = gamma_e1

    They differ only in how fast the |0>-|1> coherence dephases (r_1 / 2 against (r_a + r_b) / 2).
    """

    model_config = {"frozen": True}

    t1: float = Field(default=7.0, gt=0, description="Energy relaxation time of both excited states (us)")
    t2_0e: float = Field(default=8.0, gt=0, description="Ramsey time of the |0>-|e> transition (us)")
    t2_e1: float = Field(default=3.9, gt=0, description="Ramsey time of the |e>-|1> transition (us)")
    dephasing: DephasingForm = Field(default=DephasingForm.LEVEL, description="Form of the dephasing operators")

    @computed_field
    @property
    def relaxation_rate(self) -> float:
        return 1.0 / self.t1

    @computed_field
    @property
    def pure_dephasing_0e(self) -> float:
        return 1.0 / self.t2_0e - 1.0 / (2 * self.t1)

    @computed_field
    @property
    def pure_dephasing_e1(self) -> float:
        return 1.0 / self.t2_e1 - 1.0 / self.t1

    @computed_field
    @property
    def dephasing_rates(self) -> tuple[float, float]:
        """Rates in 1/us of the two operators of `dephasing_operators`."""
        if self.dephasing is DephasingForm.LEVEL:
            r_e = 2 * self.pure_dephasing_0e
            return r_e, 2 * self.pure_dephasing_e1 - r_e
        r_a, r_b = np.linalg.solve([[2.0, 0.5], [0.5, 2.0]], [self.pure_dephasing_0e, self.pure_dephasing_e1])
        return float(r_a), float(r_b)

    def dephasing_operators(self) -> list[np.ndarray]:
        if self.dephasing is DephasingForm.LEVEL:
            return [ketbra(AUX, AUX), ketbra(UPPER, UPPER)]
        return [ketbra(AUX, AUX) - ketbra(GROUND, GROUND), ketbra(UPPER, UPPER) - ketbra(AUX, AUX)]

    def coherence_decay_rate(self, i: int, j: int) -> float:
        """Total decay rate (1/us) of the (i, j) coherence with no drive applied."""
        decaying = {AUX, UPPER}
        rate = self.relaxation_rate * len({i, j} & decaying) / 2
        for op, r in zip(self.dephasing_operators(), self.dephasing_rates):
            rate += r * abs(op[i, i] - op[j, j]) ** 2 / 2
        return float(rate)

    @model_validator(mode="after")
    def _realisable(self) -> "NoiseModel":
        if self.pure_dephasing_0e < 0 or self.pure_dephasing_e1 < 0:
            raise ValueError(
                f"T2 values ({self.t2_0e}, {self.t2_e1}) us exceed the relaxation limit set by T1 = {self.t1} us"
            )
        if min(self.dephasing_rates) < 0:
            raise ValueError(
                f"No nonnegative {self.dephasing.value} dephasing rates reproduce T2 = ({self.t2_0e}, {self.t2_e1}) us"
            )
        return self


class CollapseSet(BaseModel):
    """Lindblad operators L_k with rates gamma_k in 1/ns."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    operators: np.ndarray = Field(description="Stack of 3x3 collapse operators")
    rates: tuple[float, ...] = Field(description="Rate of each operator (1/ns)")

    @field_validator("operators", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        stack = np.asarray(value, dtype=complex).reshape(-1, 3, 3)
        return frozen_array(stack, stack.shape)

    @field_validator("rates")
    @classmethod
    def _nonnegative(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(not np.isfinite(r) or r < 0 for r in value):
            raise ValueError(f"collapse rates must be finite and nonnegative, got {value}")
        return value

    @model_validator(mode="after")
    def _matching_lengths(self) -> "CollapseSet":
        if len(self.rates) != self.operators.shape[0]:
            raise ValueError(f"{self.operators.shape[0]} operators but {len(self.rates)} rates")
        return self

    @classmethod
    def empty(cls) -> "CollapseSet":
        return cls(operators=np.zeros((0, 3, 3)), rates=())

    @classmethod
    def from_noise(cls, noise: NoiseModel) -> "CollapseSet":
        operators = [ketbra(GROUND, AUX), ketbra(AUX, UPPER), *noise.dephasing_operators()]
        rates = tuple(r / NS_PER_US for r in (noise.relaxation_rate, noise.relaxation_rate, *noise.dephasing_rates))
        return cls(operators=operators, rates=rates)

    def __len__(self) -> int:
        return len(self.rates)


def dissipator(noise: CollapseSet) -> np.ndarray:
    """Row-major superoperator of sum_k gamma_k (L rho L^dagger - {L^dagger L, rho}/2)."""
    identity = np.eye(3)
    total = np.zeros((9, 9), dtype=complex)
    for op, rate in zip(noise.operators, noise.rates):
        number = dagger(op) @ op
        total += rate * (np.kron(op, op.conj()) - 0.5 * np.kron(number, identity) - 0.5 * np.kron(identity, number.T))
    return total


def commutator_superoperator(hamiltonian: np.ndarray) -> np.ndarray:
    """Row-major superoperator of -i[h, rho]."""
    identity = np.eye(3)
    return -1j * (np.kron(hamiltonian, identity) - np.kron(identity, hamiltonian.T))


def liouvillian(h: InteractionHamiltonian | None, noise: CollapseSet) -> Callable[[float], np.ndarray]:
    """t -> 9x9 generator of the master equation."""
    fixed = dissipator(noise)
    if h is None:
        return lambda t: fixed
    if h.ramp is None:
        coherent = commutator_superoperator(0.5 * drive_matrix(h.drive))
        return lambda t: envelope_value(h.envelope, t) * coherent + fixed
    return lambda t: commutator_superoperator(hamiltonian_at(h, t)) + fixed


def _rk4(generator: Callable[[float], np.ndarray], state: np.ndarray, t_final: float, dt: float) -> np.ndarray:
    if dt > MAX_LINDBLAD_STEP:
        raise StepTooCoarse(f"Lindblad step {dt} ns exceeds {MAX_LINDBLAD_STEP} ns")
    steps = step_count(t_final, dt)
    for k in range(steps):
        t = k * dt
        start, middle, end = generator(t), generator(t + dt / 2), generator(t + dt)
        k1 = start @ state
        k2 = middle @ (state + dt / 2 * k1)
        k3 = middle @ (state + dt / 2 * k2)
        k4 = end @ (state + dt * k3)
        state = state + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return state


def lindblad_evolve(
    rho0: DensityMatrix,
    h: InteractionHamiltonian | None,
    noise: CollapseSet,
    t_final: float,
    dt: float,
) -> DensityMatrix:
    """Integrate d rho/dt = -i[h(t), rho] + sum_k gamma_k (L rho L^dagger - {L^dagger L, rho}/2)."""
    rho = _rk4(liouvillian(h, noise), vec(rho0.elements), t_final, dt).reshape(3, 3)
    drift = abs(np.trace(rho).real - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise StepTooCoarse(f"Trace drifted by {drift:.3e} with step {dt} ns")
    smallest = float(np.linalg.eigvalsh((rho + dagger(rho)) / 2)[0])
    if smallest < POSITIVITY_FLOOR:
        raise StepTooCoarse(f"Density matrix lost positivity (eigenvalue {smallest:.3e}) with step {dt} ns")
    return DensityMatrix.trusted(rho)


def lindblad_superoperator(
    h: InteractionHamiltonian | None,
    noise: CollapseSet,
    t_final: float,
    dt: float,
) -> np.ndarray:
    """9x9 row-major transfer matrix of the master equation over [0, t_final]."""
    superoperator = _rk4(liouvillian(h, noise), np.eye(9, dtype=complex), t_final, dt)
    trace_row = vec(np.eye(3)) @ superoperator
    drift = float(np.max(np.abs(trace_row - vec(np.eye(3)))))
    if drift > TRACE_DRIFT_LIMIT:
        raise StepTooCoarse(f"Transfer matrix is not trace preserving (drift {drift:.3e}) with step {dt} ns")
    return superoperator


def trajectory(
    rho0: DensityMatrix,
    h: InteractionHamiltonian | None,
    noise: CollapseSet,
    t_final: float,
    dt: float,
) -> np.ndarray:
    """Density matrices at every step boundary, shape (steps + 1, 3, 3); unitary stepping when ``noise`` is empty."""
    if len(noise) == 0 and h is not None:
        path = propagator_path(h, dt, t_final)
        return path @ rho0.elements @ dagger(path)
    generator = liouvillian(h, noise)
    steps = step_count(t_final, dt)
    states = np.empty((steps + 1, 9), dtype=complex)
    states[0] = vec(rho0.elements)
    for k in range(steps):
        states[k + 1] = _rk4(lambda t, k=k: generator(t + k * dt), states[k], dt, dt)
    return states.reshape(-1, 3, 3)
