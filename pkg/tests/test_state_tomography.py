import numpy as np
import pytest

from qutrit_holonomy.core.evolution import NoiseModel, propagator
from qutrit_holonomy.core.models import AUX, GROUND, UPPER, DensityMatrix, QutritState
from qutrit_holonomy.tomography.preparation import (
    ANALYSIS_SETTINGS,
    ROTATIONS,
    X_PI_LOWER,
    X_PI_UPPER,
    Y_HALF_LOWER,
    Y_HALF_UPPER,
    TomographyMode,
    find_recipe,
    input_state_set,
    padded,
    prepare_input,
)
from qutrit_holonomy.tomography.state import (
    assert_informationally_complete,
    design_matrix,
    measure,
    project_simplex,
    project_to_density,
    state_fidelity,
    state_tomography,
)


def test_input_recipes():
    inputs = input_state_set()
    assert len(inputs) == 9
    assert inputs.recipes[0] == ()
    assert inputs.recipes[1] == (X_PI_LOWER,)
    assert inputs.recipes[2] == (X_PI_LOWER, X_PI_UPPER)
    assert inputs.recipes[3] == (Y_HALF_LOWER,)
    assert inputs.recipes[7] == (X_PI_LOWER, Y_HALF_UPPER)
    assert all(len(recipe) <= 3 for recipe in inputs.recipes)


def test_find_recipe_up_to_phase():
    recipe = find_recipe(QutritState.normalized([0, 1j, 0]))
    assert recipe == (X_PI_LOWER,)


@pytest.mark.parametrize("rotation", ROTATIONS, ids=str)
def test_rotation_pulses_realise_rotations(rotation):
    u = propagator(rotation.pulse())
    assert np.allclose(u, rotation.unitary(), atol=1e-8)


def test_pulsed_noiseless_preparation_matches_ideal():
    mode = TomographyMode.pulsed()
    for index in range(9):
        ideal = prepare_input(index).elements
        assert np.allclose(prepare_input(index, mode).elements, ideal, atol=1e-8)


def test_padding_puts_idle_slots_first():
    assert padded((X_PI_LOWER,), 2) == (None, X_PI_LOWER)
    assert padded((), 2) == (None, None)


def test_prepare_input_index_range():
    with pytest.raises(IndexError):
        prepare_input(9)


def test_sequence_duration():
    mode = TomographyMode.pulsed(noise=NoiseModel())
    assert mode.typical_sequence_duration() == pytest.approx(208.0)
    assert mode.sequence_duration(1) == pytest.approx(40.0)


def test_sequence_durations_of_the_input_recipes():
    mode = TomographyMode.pulsed(noise=NoiseModel())
    recipes = input_state_set().recipes
    durations = [mode.sequence_duration(max(len(r), mode.prep_slots) + 1 + mode.analysis_slots) for r in recipes]
    assert set(durations) == {208.0, 250.0}
    assert durations[:4] == [208.0] * 4
    # two rotations only reach |0> - |1> and |0> - i|1>, so |0> + |1> and |0> + i|1> take a third
    assert durations[5] == durations[6] == 250.0
    assert max(len(r) for r in recipes) == 3


def test_analysis_settings_are_informationally_complete():
    assert len(ANALYSIS_SETTINGS) == 9
    assert_informationally_complete()
    assert np.linalg.matrix_rank(design_matrix()) == 9


def test_measure_sums_to_one(random_density):
    probabilities = measure(DensityMatrix(elements=random_density()))
    assert probabilities.shape == (9, 3)
    assert np.allclose(probabilities.sum(axis=1), 1.0)
    assert np.all(probabilities >= 0)


def test_pulsed_noiseless_measurement_matches_ideal(random_density):
    rho = random_density()
    assert np.allclose(measure(rho, TomographyMode.pulsed()), measure(rho), atol=1e-8)


def test_exact_state_tomography(random_density):
    rho = random_density()
    estimate = state_tomography(DensityMatrix(elements=rho))
    assert np.allclose(estimate.elements, rho, atol=1e-10)


def test_sampled_state_tomography(rng):
    state = QutritState.normalized([1.0, 0.5j, -0.7])
    estimate = state_tomography(state.density(), shots=20000, rng=rng)
    assert np.trace(estimate.elements).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(estimate.elements)[0] > -1e-12
    assert state_fidelity(estimate, state.density()) > 0.97


def test_project_simplex():
    projected = project_simplex(np.array([0.9, 0.4, -0.2]))
    assert projected.sum() == pytest.approx(1.0)
    assert np.all(projected >= 0)
    assert np.allclose(projected, [0.75, 0.25, 0.0])


def test_project_to_density():
    m = np.diag([1.2, -0.1, -0.1]).astype(complex)
    projected = project_to_density(m)
    assert np.allclose(projected, np.diag([1.0, 0.0, 0.0]))


def test_state_fidelity_of_pure_states():
    zero = QutritState.basis(GROUND).density()
    plus = QutritState.superposition(GROUND, UPPER).density()
    assert state_fidelity(zero, zero) == pytest.approx(1.0)
    assert state_fidelity(zero, plus) == pytest.approx(0.5)
    assert state_fidelity(zero, QutritState.basis(AUX).density()) == pytest.approx(0.0, abs=1e-12)
