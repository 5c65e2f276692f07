"""Choi-matrix conversions and linear inversion of process data.

Choi convention: J = sum_ij |i><j| (x) E(|i><j|), input factor first. With B the matrix whose columns
are the column-stacked basis operators, J = B chi B^dagger.
"""

from functools import cache

import numpy as np

from qutrit_holonomy.core.errors import ReconstructionSingular
from qutrit_holonomy.core.qutrit import dagger, operator_basis
from qutrit_holonomy.tomography.preparation import input_state_set
from qutrit_holonomy.tomography.records import MeasurementRecord
from qutrit_holonomy.tomography.state import linear_inversion


@cache
def choi_basis_matrix() -> np.ndarray:
    """Columns vec_c(P_k) = P_k^T flattened row-major."""
    return np.stack([op.T.reshape(-1) for op in operator_basis().operators], axis=1)


def chi_to_choi(chi: np.ndarray) -> np.ndarray:
    b = choi_basis_matrix()
    return b @ np.asarray(chi) @ dagger(b)


def choi_to_chi(choi: np.ndarray) -> np.ndarray:
    b_inverse = np.linalg.inv(choi_basis_matrix())
    chi = b_inverse @ np.asarray(choi) @ dagger(b_inverse)
    return (chi + dagger(chi)) / 2


def superoperator_to_choi(superoperator: np.ndarray) -> np.ndarray:
    """Row-major transfer matrix S[(k,l),(i,j)] -> J[(i,k),(j,l)]."""
    return np.asarray(superoperator).reshape(3, 3, 3, 3).transpose(2, 0, 3, 1).reshape(9, 9)


def choi_to_superoperator(choi: np.ndarray) -> np.ndarray:
    return np.asarray(choi).reshape(3, 3, 3, 3).transpose(1, 3, 0, 2).reshape(9, 9)


def partial_trace_output(choi: np.ndarray) -> np.ndarray:
    return np.einsum("ikjk->ij", np.asarray(choi).reshape(3, 3, 3, 3))


def superoperator_from_states(inputs: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """S with vec(out_i) = S vec(in_i) for nine linearly independent inputs."""
    columns_in = np.stack([m.reshape(-1) for m in inputs], axis=1)
    columns_out = np.stack([m.reshape(-1) for m in outputs], axis=1)
    if np.linalg.matrix_rank(columns_in) < 9:
        raise ReconstructionSingular("input states are not linearly independent")
    return columns_out @ np.linalg.inv(columns_in)


def ideal_inputs() -> np.ndarray:
    return np.array([state.density().elements for state in input_state_set().states])


def linear_choi(records: MeasurementRecord) -> np.ndarray:
    """Choi matrix from per-input linear state inversion, assuming ideal inputs and analysis."""
    outputs = np.array([linear_inversion(block) for block in records.frequencies])
    return superoperator_to_choi(superoperator_from_states(ideal_inputs(), outputs))
