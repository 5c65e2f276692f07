import numpy as np
import pytest
from scipy.special import erf

from qutrit_holonomy.core.errors import StepTooCoarse
from qutrit_holonomy.core.evolution import (
    CollapseSet,
    DephasingForm,
    InteractionHamiltonian,
    NoiseModel,
    RatioRamp,
    closed_form_propagator,
    drive_matrix,
    lindblad_evolve,
    lindblad_superoperator,
    parallel_transport_residual,
    propagator,
    time_ordered_propagator,
    trajectory,
)
from qutrit_holonomy.core.holonomy import NAMED_GATES, analytic_unitary, gate_pulse, logical_block
from qutrit_holonomy.core.models import AUX, GROUND, UPPER, DensityMatrix, GateSpec, QutritState
from qutrit_holonomy.core.pulses import GaussianEnvelope, drive_from_angles
from qutrit_holonomy.core.qutrit import expm_hermitian, vec

GRID = [(theta, phi) for theta in np.linspace(0, np.pi, 5) for phi in np.linspace(0, 2 * np.pi, 5, endpoint=False)]


@pytest.mark.parametrize("theta, phi", GRID)
def test_cyclic_pulse_realises_the_gate(theta, phi):
    g = GateSpec(theta=theta, phi=phi)
    u = propagator(gate_pulse(g))
    assert np.allclose(logical_block(u), analytic_unitary(g).elements, atol=1e-8)
    # no population is left in |e> and |e> returns to itself up to sign
    assert abs(u[AUX, GROUND]) ** 2 < 1e-6
    assert abs(u[AUX, UPPER]) ** 2 < 1e-6
    assert abs(abs(u[AUX, AUX]) - 1) < 1e-8


def test_closed_form_matches_time_ordered_product():
    pulse = gate_pulse(GateSpec(theta=1.1, phi=0.4))
    assert np.allclose(propagator(pulse), closed_form_propagator(pulse), atol=1e-10)


def test_dark_state_is_annihilated():
    drive = drive_from_angles(0.8, 2.0)
    dark = np.zeros(3, dtype=complex)
    dark[GROUND], dark[UPPER] = drive.b, -drive.a
    assert np.allclose(drive_matrix(drive) @ dark, 0)


def test_parallel_transport_holds_for_fixed_ratio():
    pulse = gate_pulse(GateSpec(theta=np.pi / 4, phi=np.pi))
    residual = parallel_transport_residual(pulse, samples=41)
    assert residual < 1e-10 * pulse.envelope.peak


def test_parallel_transport_breaks_under_ratio_ramp():
    pulse = gate_pulse(GateSpec(theta=np.pi / 4, phi=np.pi))
    ramp = RatioRamp(theta_start=0.0, theta_end=np.pi / 2)
    assert parallel_transport_residual(pulse, samples=41, ramp=ramp) > 1e-4 * pulse.envelope.peak


def test_step_halving_commuting_drive():
    sigma, length, peak = 10.0, 40.0, 0.3
    envelope = GaussianEnvelope(sigma=sigma, total_length=length, peak=peak)
    edge = np.exp(-(length**2) / (8 * sigma**2))
    area = peak * (sigma * np.sqrt(2 * np.pi) * erf(length / (2 * np.sqrt(2) * sigma)) - length * edge)
    drive = drive_from_angles(1.0, 0.5)
    h = InteractionHamiltonian(drive=drive, envelope=envelope)
    exact = expm_hermitian(drive_matrix(drive), area / 2)
    errors = [np.max(np.abs(time_ordered_propagator(h, dt) - exact)) for dt in (1.0, 0.5, 0.25)]
    assert errors[0] / errors[1] >= 4
    assert errors[1] / errors[2] >= 4


def test_step_halving_ramped_drive():
    envelope = GaussianEnvelope(sigma=10.0, total_length=40.0, peak=0.3)
    h = InteractionHamiltonian(
        drive=drive_from_angles(0.0, 0.0), envelope=envelope, ramp=RatioRamp(theta_start=0.0, theta_end=np.pi / 2)
    )
    reference = time_ordered_propagator(h, 0.0125)
    coarse = np.max(np.abs(time_ordered_propagator(h, 0.4) - reference))
    fine = np.max(np.abs(time_ordered_propagator(h, 0.2) - reference))
    assert coarse / fine >= 3.9


def test_dephasing_rates():
    r_e, r_1 = NoiseModel().dephasing_rates
    assert r_e == pytest.approx(0.107143, rel=1e-4)
    assert r_1 == pytest.approx(0.119963, rel=1e-4)
    r_a, r_b = NoiseModel(dephasing=DephasingForm.LADDER).dephasing_rates
    assert r_a == pytest.approx(0.013431, rel=1e-4)
    assert r_b == pytest.approx(0.053419, rel=1e-4)
    assert 2 * r_a + r_b / 2 == pytest.approx(1 / 8.0 - 1 / 14.0)


@pytest.mark.parametrize("form", list(DephasingForm))
def test_unrealisable_noise(form):
    with pytest.raises(ValueError):
        NoiseModel(t1=7.0, t2_0e=20.0, t2_e1=3.9, dephasing=form)


def test_level_form_needs_the_faster_upper_transition():
    # 0-e pure dephasing above e-1 would need a negative |1><1| rate
    NoiseModel(t2_0e=8.0, t2_e1=5.5, dephasing=DephasingForm.LADDER)
    with pytest.raises(ValueError, match="level"):
        NoiseModel(t2_0e=8.0, t2_e1=5.5)


def test_relaxation_of_e():
    rho = lindblad_evolve(QutritState.basis(AUX).density(), None, CollapseSet.from_noise(NoiseModel()), 1000.0, 1.0)
    assert rho.population(AUX) == pytest.approx(np.exp(-1000.0 / 7000.0), rel=1e-6)
    assert rho.population(GROUND) == pytest.approx(1 - np.exp(-1000.0 / 7000.0), rel=1e-6)


@pytest.mark.parametrize("form", list(DephasingForm))
@pytest.mark.parametrize("levels, t2", [((GROUND, AUX), 8000.0), ((AUX, UPPER), 3900.0)])
def test_ramsey_decay(levels, t2, form):
    rho0 = QutritState.superposition(*levels).density()
    rho = lindblad_evolve(rho0, None, CollapseSet.from_noise(NoiseModel(dephasing=form)), 2000.0, 1.0)
    assert 2 * abs(rho.elements[levels]) == pytest.approx(np.exp(-2000.0 / t2), rel=1e-6)


@pytest.mark.parametrize("form", list(DephasingForm))
def test_logical_coherence_decay(form):
    noise = NoiseModel(dephasing=form)
    rate = noise.coherence_decay_rate(GROUND, UPPER)
    rho = lindblad_evolve(
        QutritState.superposition(GROUND, UPPER).density(), None, CollapseSet.from_noise(noise), 2000.0, 1.0
    )
    assert 2 * abs(rho.elements[GROUND, UPPER]) == pytest.approx(np.exp(-2.0 * rate), rel=1e-6)
    assert noise.coherence_decay_rate(GROUND, AUX) == pytest.approx(1 / 8.0)
    assert noise.coherence_decay_rate(AUX, UPPER) == pytest.approx(1 / 3.9)


def test_level_form_dephases_logical_coherence_faster():
    level = NoiseModel().coherence_decay_rate(GROUND, UPPER)
    ladder = NoiseModel(dephasing=DephasingForm.LADDER).coherence_decay_rate(GROUND, UPPER)
    assert level == pytest.approx(1 / 14.0 + 0.119963 / 2, rel=1e-4)
    assert ladder == pytest.approx(1 / 14.0 + (0.013431 + 0.053419) / 2, rel=1e-4)
    assert level > ladder


def test_lindblad_step_limit():
    with pytest.raises(StepTooCoarse):
        lindblad_evolve(DensityMatrix.maximally_mixed(), None, CollapseSet.from_noise(NoiseModel()), 10.0, 2.0)


def test_noiseless_lindblad_matches_unitary():
    pulse = gate_pulse(GateSpec(theta=np.pi / 2, phi=0.0))
    h = InteractionHamiltonian.from_pulse(pulse)
    superoperator = lindblad_superoperator(h, CollapseSet.empty(), 40.0, 0.02)
    u = propagator(pulse)
    assert np.allclose(superoperator, np.kron(u, u.conj()), atol=1e-7)


def test_noisy_superoperator_preserves_trace():
    pulse = gate_pulse(GateSpec(theta=np.pi / 4, phi=np.pi))
    superoperator = lindblad_superoperator(
        InteractionHamiltonian.from_pulse(pulse), CollapseSet.from_noise(NoiseModel()), 40.0, 0.02
    )
    assert np.allclose(vec(np.eye(3)) @ superoperator, vec(np.eye(3)), atol=1e-10)


def test_driven_lindblad_evolution_of_not():
    pulse = gate_pulse(NAMED_GATES["NOT"])
    h = InteractionHamiltonian.from_pulse(pulse)
    rho0 = QutritState.basis(GROUND).density()
    flipped = lindblad_evolve(rho0, h, CollapseSet.empty(), 40.0, 0.02)
    assert np.allclose(flipped.elements, QutritState.basis(UPPER).density().elements, atol=1e-6)
    noisy = lindblad_evolve(rho0, h, CollapseSet.from_noise(NoiseModel()), 40.0, 0.02)
    assert np.trace(noisy.elements).real == pytest.approx(1.0, abs=1e-8)
    assert noisy.population(UPPER) > 0.99
    assert noisy.population(AUX) < 0.01


def test_trajectory_shapes():
    pulse = gate_pulse(GateSpec(theta=np.pi / 2, phi=0.0)).with_time_step(0.1)
    h = InteractionHamiltonian.from_pulse(pulse)
    rho0 = QutritState.basis(GROUND).density()
    unitary = trajectory(rho0, h, CollapseSet.empty(), 40.0, 0.1)
    noisy = trajectory(rho0, h, CollapseSet.from_noise(NoiseModel()), 40.0, 0.1)
    assert unitary.shape == noisy.shape == (401, 3, 3)
    assert np.allclose(np.trace(noisy, axis1=1, axis2=2), 1.0, atol=1e-10)
    assert noisy[-1][UPPER, UPPER].real > 0.98
