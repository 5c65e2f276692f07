"""Maximum-likelihood process reconstruction over completely positive, trace-preserving channels.

The estimate is kept as a Choi matrix J >= 0 with Tr_out J = I. Each iteration applies the diluted
update J -> R J R with R = (I + eps K) / (1 + eps), K being the likelihood gradient, and then restores
trace preservation. A step is kept only when the log-likelihood does not drop; otherwise the dilution
is halved and the step retried.
"""

import logging

import numpy as np
from pydantic import BaseModel, Field

from qutrit_holonomy.core.errors import InfeasibleRecords, NotConverged
from qutrit_holonomy.core.models import ProcessMatrix
from qutrit_holonomy.core.qutrit import dagger
from qutrit_holonomy.tomography.choi import choi_to_chi, ideal_inputs, linear_choi, partial_trace_output
from qutrit_holonomy.tomography.records import MeasurementRecord
from qutrit_holonomy.tomography.state import measurement_operators

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 100_000
DEFAULT_TOLERANCE = 1e-10
INITIAL_DILUTION = 0.5
MAX_DILUTION = 100.0
MIN_DILUTION = 1e-12
SEED_MIXING = 1e-2
EIGENVALUE_FLOOR = 1e-12


class MLEResult(BaseModel):
    """Outcome of a likelihood maximisation; ``history`` holds the log-likelihood of every kept iterate."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    process: ProcessMatrix
    choi: np.ndarray
    history: tuple[float, ...] = Field(description="Log-likelihood after the seed and every accepted step")
    iterations: int = Field(ge=0)
    converged: bool


def likelihood_operators() -> np.ndarray:
    """E_iso = rho_i^T (x) Pi_so with p_iso = tr(J E_iso), shape (inputs, settings, outcomes, 9, 9)."""
    inputs = ideal_inputs()
    povm = measurement_operators()
    return np.einsum("iab,socd->isoacbd", np.swapaxes(inputs, -1, -2), povm).reshape(
        len(inputs), povm.shape[0], povm.shape[1], 9, 9
    )


def _probabilities(operators: np.ndarray, choi: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("...ab,ba->...", operators, choi))


def _log_likelihood(weights: np.ndarray, probabilities: np.ndarray) -> float:
    observed = weights > 0
    if np.any(probabilities[observed] <= 0):
        return -np.inf
    return float(np.sum(weights[observed] * np.log(probabilities[observed])))


def _hermitian_power(m: np.ndarray, power: float) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh((m + dagger(m)) / 2)
    return (vectors * np.clip(eigenvalues, EIGENVALUE_FLOOR, None) ** power) @ dagger(vectors)


def trace_preserving(choi: np.ndarray) -> np.ndarray:
    """(L^-1/2 (x) I) J (L^-1/2 (x) I) with L = Tr_out J, so the result has identity input marginal."""
    correction = np.kron(_hermitian_power(partial_trace_output(choi), -0.5), np.eye(3))
    result = correction @ choi @ correction
    return (result + dagger(result)) / 2


def _positive_part(choi: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh((choi + dagger(choi)) / 2)
    return (vectors * np.clip(eigenvalues, 0.0, None)) @ dagger(vectors)


def seed_choi(records: MeasurementRecord, operators: np.ndarray) -> np.ndarray:
    """Linear-inversion estimate made physical; mixed with the depolarizing channel until every
    observed outcome has positive probability."""
    choi = _positive_part(linear_choi(records))
    depolarizing = np.eye(9, dtype=complex) / 3
    mixing = 0.0 if np.min(np.linalg.eigvalsh(partial_trace_output(choi))) > EIGENVALUE_FLOOR else SEED_MIXING
    while True:
        candidate = trace_preserving((1 - mixing) * choi + mixing * depolarizing)
        if np.isfinite(_log_likelihood(records.weights, _probabilities(operators, candidate))):
            return candidate
        if mixing >= 1.0:
            break
        mixing = SEED_MIXING if mixing == 0.0 else min(2 * mixing, 1.0)
    raise InfeasibleRecords("No trace-preserving channel assigns positive probability to every observed outcome")


def _check_records(records: MeasurementRecord) -> None:
    weights = records.weights
    if not np.all(np.isfinite(weights)):
        raise InfeasibleRecords("records contain non-finite entries")
    empty = np.argwhere(weights.sum(axis=-1) <= 0)
    if len(empty):
        raise InfeasibleRecords(f"(input, setting) blocks {empty.tolist()} carry no weight")


def mle_fit(
    records: MeasurementRecord,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> MLEResult:
    """Maximise sum n log p over CPTP channels, starting from the linear-inversion seed.

    Stops when an accepted step changes the log-likelihood by less than ``tolerance`` relative to its
    magnitude, or when the dilution needed for a non-decreasing step falls below 1e-12 (the seed or the
    iterate is already stationary).
    """
    _check_records(records)
    weights = records.weights
    operators = likelihood_operators()
    flat_operators = operators.reshape(-1, 9, 9)
    flat_weights = weights.reshape(-1)
    norm = weights.sum(axis=-1).mean() * weights.shape[1]

    choi = seed_choi(records, operators)
    likelihood = _log_likelihood(weights, _probabilities(operators, choi))
    history = [likelihood]
    dilution = INITIAL_DILUTION
    converged = False
    iterations = 0

    while iterations < max_iterations:
        iterations += 1
        probabilities = _probabilities(flat_operators, choi)
        ratios = np.divide(flat_weights, probabilities, out=np.zeros_like(flat_weights), where=flat_weights > 0)
        gradient = np.einsum("k,kab->ab", ratios, flat_operators) / norm
        step = (np.eye(9) + dilution * gradient) / (1 + dilution)
        candidate = trace_preserving(step @ choi @ step)
        candidate_likelihood = _log_likelihood(weights, _probabilities(operators, candidate))

        if candidate_likelihood < likelihood:
            dilution /= 2
            if dilution < MIN_DILUTION:
                converged = True
                break
            continue

        change = abs(candidate_likelihood - likelihood) / max(abs(likelihood), 1e-12)
        choi, likelihood = candidate, candidate_likelihood
        history.append(likelihood)
        dilution = min(dilution * 1.5, MAX_DILUTION)
        if change < tolerance:
            converged = True
            break

    logger.debug(f"MLE finished after {iterations} iterations, log-likelihood {likelihood:.6f}")
    process = ProcessMatrix(chi=choi_to_chi(choi), method="mle")
    return MLEResult(process=process, choi=choi, history=tuple(history), iterations=iterations, converged=converged)


def mle_reconstruct(
    records: MeasurementRecord,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tolerance: float = DEFAULT_TOLERANCE,
    strict: bool = False,
) -> ProcessMatrix:
    """Maximum-likelihood chi. A run that hits ``max_iterations`` logs a warning and returns its best
    iterate, or raises NotConverged carrying that iterate when ``strict``."""
    result = mle_fit(records, max_iterations, tolerance)
    if not result.converged:
        message = f"MLE did not converge within {max_iterations} iterations"
        if strict:
            raise NotConverged(message, result=result)
        logger.warning(f"⚠️ {message}; returning the last iterate")
    return result.process
