import numpy as np
import pytest
from scipy.stats import unitary_group

from qutrit_holonomy.core.errors import DimensionMismatch
from qutrit_holonomy.core.evolution import CollapseSet, InteractionHamiltonian, NoiseModel, lindblad_superoperator
from qutrit_holonomy.core.holonomy import NAMED_GATES, analytic_unitary, embed_logical, gate_pulse
from qutrit_holonomy.core.models import DensityMatrix, GateSpec, ProcessMatrix
from qutrit_holonomy.core.qutrit import unitary_superoperator
from qutrit_holonomy.tomography.choi import (
    chi_to_choi,
    choi_to_chi,
    choi_to_superoperator,
    partial_trace_output,
    superoperator_to_choi,
)
from qutrit_holonomy.tomography.preparation import TomographyMode
from qutrit_holonomy.tomography.process import (
    apply_chi,
    chi_from_superoperator,
    chi_from_unitary,
    collect_records,
    linear_process_estimate,
    process_fidelity,
    process_tomography,
    reduce_chi,
    superoperator_channel,
    trace_preservation_residual,
    unitary_channel,
)


def test_linear_inversion_recovers_random_unitaries(rng, random_density):
    for _ in range(50):
        u = unitary_group.rvs(3, random_state=rng)
        chi = linear_process_estimate(collect_records(unitary_channel(u)))
        assert np.allclose(chi.chi, chi_from_unitary(u).chi, atol=1e-8)
        rho = random_density()
        assert np.allclose(apply_chi(chi, rho), u @ rho @ u.conj().T, atol=1e-8)


def test_choi_conventions(rng):
    u = unitary_group.rvs(3, random_state=rng)
    superoperator = unitary_superoperator(u)
    choi = superoperator_to_choi(superoperator)
    assert np.allclose(choi_to_superoperator(choi), superoperator)
    assert np.allclose(chi_to_choi(chi_from_unitary(u).chi), choi, atol=1e-12)
    assert np.allclose(choi_to_chi(choi), chi_from_unitary(u).chi, atol=1e-12)
    assert np.allclose(partial_trace_output(choi), np.eye(3), atol=1e-12)


def test_chi_from_superoperator_of_noisy_gate():
    pulse = gate_pulse(NAMED_GATES["H"])
    superoperator = lindblad_superoperator(
        InteractionHamiltonian.from_pulse(pulse), CollapseSet.from_noise(NoiseModel()), 40.0, 0.02
    )
    chi = chi_from_superoperator(superoperator)
    assert chi.min_eigenvalue > -1e-8
    assert trace_preservation_residual(chi) < 1e-8
    rho = np.diag([0.2, 0.3, 0.5]).astype(complex)
    assert np.allclose(apply_chi(chi, rho), (superoperator @ rho.reshape(-1)).reshape(3, 3), atol=1e-10)
    target = reduce_chi(chi_from_unitary(embed_logical(analytic_unitary(NAMED_GATES["H"]))))
    fidelity = process_fidelity(reduce_chi(chi), target)
    assert 0.98 < fidelity < 1.0


@pytest.mark.parametrize("theta", [0.0, np.pi / 8, np.pi / 4, np.pi / 2])
def test_reduced_chi_of_ideal_gate(theta):
    g = GateSpec(theta=theta, phi=np.pi)
    chi_tilde = reduce_chi(chi_from_unitary(embed_logical(analytic_unitary(g))))
    assert chi_tilde.trace == pytest.approx(1.0)
    assert chi_tilde.leakage == pytest.approx(0.0, abs=1e-12)
    diagonal = chi_tilde.diagonal
    assert diagonal[3] == pytest.approx(np.cos(theta) ** 2)
    assert diagonal[1] + diagonal[2] == pytest.approx(np.sin(theta) ** 2)
    assert process_fidelity(chi_tilde, chi_tilde) == pytest.approx(1.0)


def test_full_fidelity_is_normalised(rng):
    u = unitary_group.rvs(3, random_state=rng)
    assert process_fidelity(chi_from_unitary(u), chi_from_unitary(u)) == pytest.approx(1.0)
    identity = chi_from_unitary(np.eye(3))
    assert process_fidelity(chi_from_unitary(u), identity) == pytest.approx(abs(np.trace(u)) ** 2 / 9)


def test_fidelity_dimension_mismatch():
    chi = chi_from_unitary(np.eye(3))
    with pytest.raises(DimensionMismatch):
        process_fidelity(chi, reduce_chi(chi))


def test_identity_chi_is_trace_preserving():
    chi = chi_from_unitary(np.eye(3))
    assert trace_preservation_residual(chi) < 1e-12
    broken = ProcessMatrix(chi=chi.chi * 0.5)
    assert trace_preservation_residual(broken) > 0.1


def test_leakage_of_a_channel_that_populates_e():
    # amplitude transfer |0> <-> |e> leaks half of the logical subspace
    u = embed_logical(analytic_unitary(NAMED_GATES["Z"]))
    swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    chi = chi_from_unitary(swap @ u)
    assert reduce_chi(chi).leakage > 0.2


def test_superoperator_channel_matches_unitary_channel(random_density):
    u = embed_logical(analytic_unitary(NAMED_GATES["NOT"]))
    rho = DensityMatrix(elements=random_density())
    left = superoperator_channel(unitary_superoperator(u))(rho).elements
    right = unitary_channel(u)(rho).elements
    assert np.allclose(left, right)


def test_process_tomography_dispatches_on_shots(rng):
    u = embed_logical(analytic_unitary(NAMED_GATES["H"]))
    exact = process_tomography(unitary_channel(u))
    assert exact.method == "linear"
    sampled = process_tomography(unitary_channel(u), shots=500, rng=rng, mode=TomographyMode.ideal())
    assert sampled.method == "mle"
    assert sampled.min_eigenvalue > -1e-8
