import numpy as np
import pytest
from scipy.linalg import expm

from qutrit_holonomy.core.errors import DegenerateRotation
from qutrit_holonomy.core.holonomy import (
    NAMED_GATES,
    PAULI,
    analytic_unitary,
    axis_angle,
    bloch_trajectory,
    bloch_vector,
    commutation_overlap,
    compose,
    compose_sequence,
    embed_logical,
    gate_pulse,
    logical_bloch_vector,
)
from qutrit_holonomy.core.models import AUX, GROUND, UPPER, GateSpec, LogicalUnitary, QutritState

SIGMA_Y = np.array([[0, -1j], [1j, 0]])


@pytest.fixture
def gates():
    return {name: analytic_unitary(g) for name, g in NAMED_GATES.items()}


def test_named_gates(gates):
    assert np.allclose(gates["Z"].elements, np.diag([1, -1]))
    assert np.allclose(gates["H"].elements, np.array([[1, -1], [-1, -1]]) / np.sqrt(2))
    assert np.allclose(gates["NOT"].elements, [[0, 1], [1, 0]])


@pytest.mark.parametrize("theta, phi", [(0.2, 0.0), (np.pi / 3, 1.0), (np.pi, 4.0)])
def test_analytic_unitary_is_hermitian_involution(theta, phi):
    u = analytic_unitary(GateSpec(theta=theta, phi=phi)).elements
    assert np.allclose(u, u.conj().T)
    assert np.allclose(u @ u, np.eye(2))


def test_embedding_keeps_e():
    full = embed_logical(analytic_unitary(NAMED_GATES["NOT"]))
    assert full[AUX, AUX] == 1
    assert full[GROUND, UPPER] == 1
    assert np.all(full[AUX, [GROUND, UPPER]] == 0)


def test_composition_order(gates):
    not_after_h = compose(gates["H"], gates["NOT"])
    h_after_not = compose(gates["NOT"], gates["H"])
    assert not_after_h.label == "NOT·H"
    assert np.allclose(not_after_h.elements, -(np.eye(2) + 1j * SIGMA_Y) / np.sqrt(2))
    assert np.allclose(h_after_not.elements, (1j * SIGMA_Y - np.eye(2)) / np.sqrt(2))
    assert np.allclose(compose_sequence([gates["H"], gates["NOT"]]).elements, not_after_h.elements)


def test_composite_gates_do_not_commute(gates):
    overlap = commutation_overlap(compose(gates["H"], gates["NOT"]), compose(gates["NOT"], gates["H"]))
    assert overlap < 1e-10
    assert commutation_overlap(gates["H"], gates["H"]) == pytest.approx(1.0)


def test_composite_axes(gates):
    axis, angle = axis_angle(compose(gates["H"], gates["NOT"]))
    assert np.allclose(axis, [0, -1, 0])
    assert angle == pytest.approx(np.pi / 2)
    axis, angle = axis_angle(compose(gates["NOT"], gates["H"]))
    assert np.allclose(axis, [0, 1, 0])
    assert angle == pytest.approx(np.pi / 2)


def test_half_turn_axes(gates):
    axis, angle = axis_angle(gates["Z"])
    assert np.allclose(axis, [0, 0, 1])
    assert angle == pytest.approx(np.pi)
    axis, angle = axis_angle(gates["H"])
    assert np.allclose(axis, np.array([1, 0, -1]) / np.sqrt(2))
    assert angle == pytest.approx(np.pi)


def test_identity_has_no_axis(gates):
    identity = compose(gates["H"], gates["H"])
    axis, angle = axis_angle(identity)
    assert np.all(axis == 0)
    assert angle == 0.0
    with pytest.raises(DegenerateRotation):
        axis_angle(identity, strict=True)


def test_bloch_vectors():
    assert np.allclose(bloch_vector(QutritState.basis(GROUND).density()), [0, 0, 1])
    assert np.allclose(bloch_vector(QutritState.basis(UPPER).density()), [0, 0, -1])
    assert np.allclose(bloch_vector(QutritState.superposition(GROUND, UPPER).density()), [1, 0, 0])
    assert np.allclose(bloch_vector(QutritState.superposition(GROUND, UPPER, 1j).density()), [0, 1, 0])
    assert np.allclose(bloch_vector(QutritState.basis(AUX).density()), [0, 0, 0])
    assert np.allclose(logical_bloch_vector([1, 1j] / np.sqrt(2)), [0, 1, 0])


def test_bloch_trajectory_of_composite(gates):
    pulses = [gate_pulse(NAMED_GATES[name]).with_time_step(0.02) for name in ("H", "NOT")]
    times, vectors, aux = bloch_trajectory(QutritState.basis(GROUND), pulses)
    assert times.shape == (4001,)
    assert times[-1] == pytest.approx(80.0)
    expected = logical_bloch_vector(compose(gates["H"], gates["NOT"]).act([1, 0]))
    assert np.allclose(expected, [-1, 0, 0])
    assert np.allclose(vectors[-1], expected, atol=1e-6)
    assert aux.max() > 0.1
    assert aux[-1] < 1e-6


def test_embedding_preserves_inner_products(rng):
    for _ in range(20):
        q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        full = embed_logical(LogicalUnitary(elements=q * (np.diag(r) / np.abs(np.diag(r)))))
        psi, chi = (rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(2))
        logical_psi, logical_chi = psi.copy(), chi.copy()
        logical_psi[AUX] = logical_chi[AUX] = 0
        assert np.vdot(full @ logical_psi, full @ logical_chi) == pytest.approx(
            np.vdot(logical_psi, logical_chi), abs=1e-10
        )
        assert np.vdot(full @ psi, full @ chi) == pytest.approx(np.vdot(psi, chi), abs=1e-10)


def test_axis_angle_covers_su2(rng):
    for _ in range(50):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.uniform(0.01, np.pi - 0.01)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        u = LogicalUnitary(elements=phase * expm(-0.5j * angle * np.einsum("k,kij->ij", axis, PAULI)))
        found_axis, found_angle = axis_angle(u)
        assert found_angle == pytest.approx(angle, abs=1e-9)
        assert np.allclose(found_axis, axis, atol=1e-9)
        rebuilt = LogicalUnitary(elements=expm(-0.5j * found_angle * np.einsum("k,kij->ij", found_axis, PAULI)))
        assert commutation_overlap(u, rebuilt) == pytest.approx(1.0, abs=1e-10)
