"""Holonomic gates on the logical pair: closed-form construction, composition and rotation geometry."""

import logging
from typing import Sequence

import numpy as np

from qutrit_holonomy.core.errors import DegenerateRotation
from qutrit_holonomy.core.evolution import CollapseSet, InteractionHamiltonian, trajectory
from qutrit_holonomy.core.models import AUX, GROUND, UPPER, DensityMatrix, GateSpec, LogicalUnitary, QutritState
from qutrit_holonomy.core.pulses import (
    DEFAULT_LENGTH,
    DEFAULT_SIGMA,
    DEFAULT_TIME_STEP,
    DriveConfig,
    PulseSpec,
    calibrated_pulse,
    drive_from_angles,
)

logger = logging.getLogger(__name__)

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
LOGICAL_INDEX = np.ix_([GROUND, UPPER], [GROUND, UPPER])
AXIS_TOLERANCE = 1e-12

NAMED_GATES: dict[str, GateSpec] = {
    "Z": GateSpec(theta=0.0, phi=0.0, label="Z"),
    "H": GateSpec(theta=np.pi / 4, phi=np.pi, label="H"),
    "NOT": GateSpec(theta=np.pi / 2, phi=0.0, label="NOT"),
}


def analytic_unitary(g: GateSpec) -> LogicalUnitary:
    """[[cos t, e^{i p} sin t], [e^{-i p} sin t, -cos t]]; Hermitian and squares to the identity."""
    c, s = np.cos(g.theta), np.sin(g.theta)
    phase = np.exp(1j * g.phi)
    return LogicalUnitary(elements=[[c, phase * s], [np.conj(phase) * s, -c]], label=g.label)


def embed_logical(u: LogicalUnitary) -> np.ndarray:
    """3x3 unitary acting as ``u`` on (|0>, |1>) and leaving |e> untouched."""
    full = np.zeros((3, 3), dtype=complex)
    full[LOGICAL_INDEX] = u.elements
    full[AUX, AUX] = 1.0
    return full


def logical_block(u: np.ndarray) -> np.ndarray:
    return np.asarray(u)[LOGICAL_INDEX]


def compose(g_first: LogicalUnitary, g_second: LogicalUnitary) -> LogicalUnitary:
    """g_second . g_first: the first argument acts first."""
    label = f"{g_second.label}·{g_first.label}" if g_first.label and g_second.label else ""
    return LogicalUnitary(elements=g_second.elements @ g_first.elements, label=label)


def compose_sequence(gates: Sequence[LogicalUnitary]) -> LogicalUnitary:
    """Product of gates applied in list order."""
    if not gates:
        raise ValueError("gate sequence is empty")
    result = gates[0]
    for gate in gates[1:]:
        result = compose(result, gate)
    return result


def commutation_overlap(u1: LogicalUnitary, u2: LogicalUnitary) -> float:
    """|tr(u1^dagger u2)| / 2; 1 exactly when the two agree up to a global phase."""
    return float(abs(np.trace(u1.elements.conj().T @ u2.elements)) / 2)


def axis_angle(u: LogicalUnitary, strict: bool = False) -> tuple[np.ndarray, float]:
    """Axis n and angle in [0, pi] with u = e^{i g} exp(-i angle/2 n.sigma).

    The determinant phase is divided out and the overall sign is chosen so that cos(angle/2) >= 0.
    At angle pi, n and -n describe the same rotation and the first nonzero component of n is made
    nonnegative. Below pi the sign of n carries the sense of rotation and is left as computed: NOT.H
    (H first) comes back as (0, -1, 0) with angle pi/2 and H.NOT as (0, 1, 0). A rotation
    proportional to the identity has no axis: it comes back as the zero vector with angle 0, or raises
    DegenerateRotation when ``strict``.
    """
    special = u.elements / np.sqrt(complex(np.linalg.det(u.elements)))
    cos_half = float(np.real(np.trace(special)) / 2)
    if cos_half < 0:
        special, cos_half = -special, -cos_half
    # sin(angle/2) n, read off the Pauli components
    scaled_axis = np.real(1j * np.einsum("ij,kji->k", special, PAULI)) / 2
    sin_half = float(np.linalg.norm(scaled_axis))
    if sin_half < AXIS_TOLERANCE:
        if strict:
            raise DegenerateRotation(f"{u.label or 'Unitary'} is proportional to the identity")
        logger.warning(f"⚠️ {u.label or 'Unitary'} is proportional to the identity; rotation axis undefined")
        return np.zeros(3), 0.0
    angle = 2 * float(np.arctan2(sin_half, cos_half))
    axis = scaled_axis / sin_half
    if np.pi - angle < 1e-9:
        leading = next(component for component in axis if abs(component) > AXIS_TOLERANCE)
        if leading < 0:
            axis = -axis
    return axis, angle


def gate_drive(g: GateSpec) -> DriveConfig:
    """Drive pair whose 2 pi pulse realises ``analytic_unitary(g)``.

    A 2 pi pulse maps the bright state a*|0> + b*|1> to minus itself, which is the closed-form matrix
    evaluated at phase pi - phi of the drive pair; the gate phase is mirrored accordingly.
    """
    return drive_from_angles(g.theta, (np.pi - g.phi) % (2 * np.pi))


def gate_pulse(
    g: GateSpec,
    sigma: float = DEFAULT_SIGMA,
    total_length: float = DEFAULT_LENGTH,
    time_step: float = DEFAULT_TIME_STEP,
) -> PulseSpec:
    return calibrated_pulse(gate_drive(g), sigma, total_length, time_step)


def bloch_vector(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """(x, y, z) of the logical-pair block with z = +1 for |0>; shrinks when |e> is populated."""
    m = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho)
    coherence = m[..., GROUND, UPPER]
    return np.stack(
        [2 * np.real(coherence), -2 * np.imag(coherence), np.real(m[..., GROUND, GROUND] - m[..., UPPER, UPPER])],
        axis=-1,
    )


def logical_bloch_vector(amplitudes: np.ndarray) -> np.ndarray:
    """Bloch vector of a pure state given by its two logical amplitudes."""
    alpha, beta = np.asarray(amplitudes, dtype=complex)
    coherence = alpha * np.conj(beta)
    return np.array([2 * coherence.real, -2 * coherence.imag, abs(alpha) ** 2 - abs(beta) ** 2])


def bloch_trajectory(
    initial: QutritState | DensityMatrix,
    pulses: Sequence[PulseSpec],
    noise: CollapseSet | None = None,
    time_step: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Times, logical Bloch vectors and |e> populations at every step of ``pulses`` played back to back.

    ``time_step`` overrides the pulses' own step, which the master equation needs when ``noise`` is set.
    """
    rho = initial.density() if isinstance(initial, QutritState) else initial
    noise = noise if noise is not None else CollapseSet.empty()
    times, states = [np.zeros(1)], [rho.elements[None]]
    offset = 0.0
    for spec in pulses:
        dt = time_step or spec.time_step
        path = trajectory(rho, InteractionHamiltonian.from_pulse(spec), noise, spec.duration, dt)
        times.append(offset + dt * np.arange(1, len(path)))
        states.append(path[1:])
        offset += spec.duration
        rho = DensityMatrix.trusted(path[-1])
    stacked = np.concatenate(states)
    return np.concatenate(times), bloch_vector(stacked), np.real(stacked[:, AUX, AUX])
