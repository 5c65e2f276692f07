"""State tomography: population measurements after the analysis rotations, linear inversion and
projection onto the physical density matrices."""

import logging
from functools import cache

import numpy as np

from qutrit_holonomy.core.errors import ReconstructionSingular
from qutrit_holonomy.core.models import DensityMatrix
from qutrit_holonomy.core.qutrit import dagger, ketbra
from qutrit_holonomy.tomography.preparation import (
    ANALYSIS_SETTINGS,
    AnalysisSetting,
    TomographyMode,
    analysis_superoperator,
)

logger = logging.getLogger(__name__)

OUTCOMES = 3


def measurement_operators(settings: tuple[AnalysisSetting, ...] = ANALYSIS_SETTINGS) -> np.ndarray:
    """POVM elements U^dagger |o><o| U, shape (settings, outcomes, 3, 3)."""
    operators = np.empty((len(settings), OUTCOMES, 3, 3), dtype=complex)
    for s, setting in enumerate(settings):
        u = setting.unitary()
        for outcome in range(OUTCOMES):
            operators[s, outcome] = dagger(u) @ ketbra(outcome, outcome) @ u
    return operators


@cache
def design_matrix(settings: tuple[AnalysisSetting, ...] = ANALYSIS_SETTINGS) -> np.ndarray:
    """A with probabilities = A @ vec(rho); rows are vec(Pi^T) of every POVM element."""
    operators = measurement_operators(settings)
    design = np.swapaxes(operators, -1, -2).reshape(len(settings) * OUTCOMES, 9)
    rank = np.linalg.matrix_rank(design)
    if rank < 9:
        raise ReconstructionSingular(f"Analysis settings determine only {rank} of 9 state parameters")
    return design


def assert_informationally_complete() -> None:
    design_matrix(ANALYSIS_SETTINGS)
    logger.debug(f"✅ {len(ANALYSIS_SETTINGS)} analysis settings are informationally complete")


def measure(rho: np.ndarray | DensityMatrix, mode: TomographyMode | None = None) -> np.ndarray:
    """Outcome probabilities of every setting, shape (settings, outcomes)."""
    elements = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    mode = mode or TomographyMode.ideal()
    probabilities = np.empty((len(ANALYSIS_SETTINGS), OUTCOMES))
    for s, setting in enumerate(ANALYSIS_SETTINGS):
        rotated = (analysis_superoperator(setting, mode) @ elements.reshape(-1)).reshape(3, 3)
        probabilities[s] = np.real(np.diag(rotated))
    probabilities = np.clip(probabilities, 0.0, None)
    return probabilities / probabilities.sum(axis=1, keepdims=True)


def sample_counts(probabilities: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    return np.array([rng.multinomial(shots, p) for p in probabilities])


def linear_inversion(frequencies: np.ndarray) -> np.ndarray:
    """Least-squares 3x3 estimate (Hermitian, not necessarily positive) from outcome frequencies."""
    design = design_matrix(ANALYSIS_SETTINGS)
    solution, *_ = np.linalg.lstsq(design, np.asarray(frequencies, dtype=complex).reshape(-1), rcond=None)
    rho = solution.reshape(3, 3)
    return (rho + dagger(rho)) / 2


def project_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of real values onto the probability simplex."""
    ordered = np.sort(values)[::-1]
    cumulative = np.cumsum(ordered) - 1.0
    positions = np.arange(1, len(values) + 1)
    active = np.nonzero(ordered - cumulative / positions > 0)[0][-1]
    shift = cumulative[active] / (active + 1)
    return np.maximum(values - shift, 0.0)


def project_to_density(m: np.ndarray) -> np.ndarray:
    """Closest unit-trace positive semidefinite matrix in Frobenius norm."""
    eigenvalues, vectors = np.linalg.eigh((m + dagger(m)) / 2)
    return (vectors * project_simplex(eigenvalues)) @ dagger(vectors)


def state_tomography(
    rho_true: DensityMatrix,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
    mode: TomographyMode | None = None,
) -> DensityMatrix:
    """Measure every analysis setting and reconstruct the state.

    With ``shots=None`` the exact probabilities are inverted; otherwise multinomial counts are drawn
    from ``rng`` and the least-squares estimate is projected onto the physical states.
    """
    probabilities = measure(rho_true, mode)
    if shots is None:
        return DensityMatrix.trusted(linear_inversion(probabilities))
    rng = rng if rng is not None else np.random.default_rng()
    frequencies = sample_counts(probabilities, shots, rng) / shots
    return DensityMatrix.trusted(project_to_density(linear_inversion(frequencies)))


def state_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    eigenvalues, vectors = np.linalg.eigh(rho.elements)
    root = (vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ dagger(vectors)
    inner = np.linalg.eigvalsh(root @ sigma.elements @ root)
    return float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2)
