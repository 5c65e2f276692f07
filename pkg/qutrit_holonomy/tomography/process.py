"""Process tomography of three-level channels: data collection, chi reconstruction, the logical-subspace
reduction and process fidelity."""

import logging
from typing import Callable

import numpy as np

from qutrit_holonomy.core.errors import DimensionMismatch
from qutrit_holonomy.core.models import DensityMatrix, ProcessMatrix, ReducedProcessMatrix
from qutrit_holonomy.core.qutrit import dagger, decompose, operator_basis
from qutrit_holonomy.tomography.choi import choi_to_chi, linear_choi, superoperator_to_choi
from qutrit_holonomy.tomography.mle import mle_reconstruct
from qutrit_holonomy.tomography.preparation import TomographyMode, prepare_input
from qutrit_holonomy.tomography.records import MeasurementRecord
from qutrit_holonomy.tomography.state import measure, sample_counts

logger = logging.getLogger(__name__)

Channel = Callable[[DensityMatrix], DensityMatrix]
IMAGINARY_RESIDUAL_LIMIT = 1e-10


def chi_from_unitary(u: np.ndarray) -> ProcessMatrix:
    coefficients = decompose(u)
    return ProcessMatrix(chi=np.outer(coefficients, coefficients.conj()), method="analytic")


def chi_from_superoperator(superoperator: np.ndarray) -> ProcessMatrix:
    return ProcessMatrix(chi=choi_to_chi(superoperator_to_choi(superoperator)), method="analytic")


def apply_chi(chi: ProcessMatrix, rho: np.ndarray) -> np.ndarray:
    """sum_mn chi_mn P_m rho P_n^dagger."""
    ops = operator_basis().operators
    return np.einsum("mn,mij,jk,nlk->il", chi.chi, ops, np.asarray(rho), ops.conj())


def trace_preservation_residual(chi: ProcessMatrix) -> float:
    """max |sum_mn chi_mn P_n^dagger P_m - I|."""
    ops = operator_basis().operators
    total = np.einsum("mn,nji,mjk->ik", chi.chi, ops.conj(), ops)
    return float(np.max(np.abs(total - np.eye(3))))


def reduce_chi(chi: ProcessMatrix) -> ReducedProcessMatrix:
    """Sub-block over the logical operators {I, X, Y~, Z}, dropping everything that touches |e>."""
    return ReducedProcessMatrix(chi_tilde=chi.chi[:4, :4])


def leakage(chi_tilde: ReducedProcessMatrix) -> float:
    return chi_tilde.leakage


def _normalised_chi(chi: np.ndarray) -> np.ndarray:
    """Trace-one representation over the orthonormalised basis."""
    weights = np.sqrt(np.real(np.diag(operator_basis().gram)))
    return weights[:, None] * chi * weights[None, :] / 3


def process_fidelity(
    chi_exp: ProcessMatrix | ReducedProcessMatrix,
    chi_th: ProcessMatrix | ReducedProcessMatrix,
) -> float:
    """tr(chi_exp chi_th).

    Reduced matrices are compared directly (an ideal gate has tr chi~ = 1). Full matrices are first
    brought to the trace-one orthonormal representation, where a unitary target gives
    |tr(U_th^dagger U)|^2 / 9.
    """
    left = chi_exp.chi_tilde if isinstance(chi_exp, ReducedProcessMatrix) else chi_exp.chi
    right = chi_th.chi_tilde if isinstance(chi_th, ReducedProcessMatrix) else chi_th.chi
    if left.shape != right.shape:
        raise DimensionMismatch(left.shape, right.shape)
    if left.shape == (9, 9):
        left, right = _normalised_chi(left), _normalised_chi(right)
    overlap = np.trace(left @ right)
    if abs(overlap.imag) > IMAGINARY_RESIDUAL_LIMIT:
        raise ValueError(f"fidelity has imaginary part {overlap.imag:.3e}; inputs are not Hermitian")
    return float(overlap.real)


def linear_process_estimate(records: MeasurementRecord) -> ProcessMatrix:
    return ProcessMatrix(chi=choi_to_chi(linear_choi(records)), method="linear")


def collect_records(
    channel: Channel,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
    mode: TomographyMode | None = None,
    seed: int | None = None,
) -> MeasurementRecord:
    """Send the nine inputs through ``channel`` and measure every analysis setting on each output."""
    mode = mode or TomographyMode.ideal()
    probabilities = np.array([measure(channel(prepare_input(i, mode)), mode) for i in range(9)])
    if shots is None:
        return MeasurementRecord(probabilities=probabilities)
    rng = rng if rng is not None else np.random.default_rng(seed)
    counts = np.array([sample_counts(block, shots, rng) for block in probabilities])
    return MeasurementRecord(counts=counts, shots=shots, seed=seed)


def process_tomography(
    channel: Channel,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
    mode: TomographyMode | None = None,
    seed: int | None = None,
) -> ProcessMatrix:
    """Exact records are inverted linearly; sampled records go through maximum likelihood."""
    records = collect_records(channel, shots, rng, mode, seed)
    if records.exact:
        return linear_process_estimate(records)
    return mle_reconstruct(records)


def unitary_channel(u: np.ndarray) -> Channel:
    u = np.asarray(u, dtype=complex)
    return lambda rho: DensityMatrix.trusted(u @ rho.elements @ dagger(u))


def superoperator_channel(superoperator: np.ndarray) -> Channel:
    return lambda rho: DensityMatrix.trusted((superoperator @ rho.elements.reshape(-1)).reshape(3, 3))
