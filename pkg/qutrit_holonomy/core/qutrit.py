"""Linear algebra on the three-level atom: adjoints, unitary exponentials and the fixed operator bases.

Vectorisation is row-major throughout, so vec(A rho B) = (A kron B^T) vec(rho).
"""

import logging
from functools import cache
from typing import Any, ClassVar

import numpy as np
from pydantic import BaseModel, Field, field_validator

from qutrit_holonomy.core.errors import NonHermitianInput, SingularBasis
from qutrit_holonomy.core.models import AUX, GROUND, UPPER, frozen_array

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-10
GRAM_CONDITION_LIMIT = 1e12


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(m), -1, -2)


def ketbra(row: int, col: int, dim: int = 3) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[row, col] = 1.0
    return m


def expm_hermitian(h: np.ndarray, s: float) -> np.ndarray:
    """exp(-i s h) for Hermitian h via its eigendecomposition; stacks of generators are exponentiated at once."""
    h = np.asarray(h, dtype=complex)
    asymmetry = float(np.max(np.abs(h - dagger(h)))) if h.size else 0.0
    if asymmetry > HERMITIAN_TOLERANCE:
        raise NonHermitianInput(asymmetry, HERMITIAN_TOLERANCE)
    energies, vectors = np.linalg.eigh((h + dagger(h)) / 2)
    return (vectors * np.exp(-1j * s * energies)[..., None, :]) @ dagger(vectors)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v: np.ndarray, dim: int = 3) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim)


def unitary_superoperator(u: np.ndarray) -> np.ndarray:
    """Row-major transfer matrix of rho -> u rho u^dagger."""
    return np.kron(u, np.conj(u))


def apply_superoperator(superoperator: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvec(superoperator @ vec(rho), int(np.sqrt(superoperator.shape[0])))


def _sigma_x(i: int, j: int) -> np.ndarray:
    return ketbra(i, j) + ketbra(j, i)


def _minus_i_sigma_y(i: int, j: int) -> np.ndarray:
    # sigma_y = -i|i><j| + i|j><i|, so -i sigma_y = -|i><j| + |j><i|
    return -ketbra(i, j) + ketbra(j, i)


class OperatorBasis(BaseModel):
    """Ordered list of 3x3 operators with their Hilbert-Schmidt Gram matrix."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    names: tuple[str, ...] = Field(description="Operator labels in basis order")
    operators: np.ndarray = Field(description="Stack of operators, shape (n, 3, 3)")

    @field_validator("operators", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        stack = np.asarray(value, dtype=complex)
        return frozen_array(stack, (stack.shape[0], 3, 3))

    def __len__(self) -> int:
        return len(self.names)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.operators[self.names.index(name)]

    @property
    def gram(self) -> np.ndarray:
        flat = self.operators.reshape(len(self), -1)
        return flat.conj() @ flat.T

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.gram))


class OperatorBasis9(OperatorBasis):
    """{I01, X01, -iY01, Z01, X0e, -iY0e, X1e, -iY1e, E}; orthogonal but not normalised."""

    NAMES: ClassVar[tuple[str, ...]] = ("I", "X", "Y", "Z", "X0e", "Y0e", "X1e", "Y1e", "E")

    @classmethod
    def standard(cls) -> "OperatorBasis9":
        identity_01 = ketbra(GROUND, GROUND) + ketbra(UPPER, UPPER)
        operators = [
            identity_01,
            _sigma_x(GROUND, UPPER),
            _minus_i_sigma_y(GROUND, UPPER),
            ketbra(GROUND, GROUND) - ketbra(UPPER, UPPER),
            _sigma_x(GROUND, AUX),
            _minus_i_sigma_y(GROUND, AUX),
            _sigma_x(UPPER, AUX),
            _minus_i_sigma_y(UPPER, AUX),
            ketbra(AUX, AUX),
        ]
        return cls(names=cls.NAMES, operators=operators)


class LogicalBasis4(OperatorBasis):
    """{I, X, Y~, Z} on the logical pair, embedded as 3x3 matrices that annihilate |e>."""

    NAMES: ClassVar[tuple[str, ...]] = ("I", "X", "Y", "Z")

    @classmethod
    def standard(cls) -> "LogicalBasis4":
        full = operator_basis()
        return cls(names=cls.NAMES, operators=full.operators[:4])

    def logical_blocks(self) -> np.ndarray:
        """The same operators as 2x2 matrices on (|0>, |1>)."""
        idx = np.ix_([GROUND, UPPER], [GROUND, UPPER])
        return np.array([op[idx] for op in self.operators])


@cache
def operator_basis() -> OperatorBasis9:
    return OperatorBasis9.standard()


@cache
def logical_basis() -> LogicalBasis4:
    return LogicalBasis4.standard()


def decompose(op: np.ndarray, basis: OperatorBasis | None = None) -> np.ndarray:
    """Coefficients c with sum_k c_k P_k = op, from the Gram system G c = <P|op>."""
    basis = operator_basis() if basis is None else basis
    gram = basis.gram
    if np.linalg.cond(gram) > GRAM_CONDITION_LIMIT:
        raise SingularBasis(f"Operator basis Gram matrix is singular (rank {basis.rank} of {len(basis)})")
    overlaps = np.einsum("kij,ij->k", basis.operators.conj(), np.asarray(op, dtype=complex))
    return np.linalg.solve(gram, overlaps)


def recompose(coefficients: np.ndarray, basis: OperatorBasis | None = None) -> np.ndarray:
    basis = operator_basis() if basis is None else basis
    return np.einsum("k,kij->ij", np.asarray(coefficients, dtype=complex), basis.operators)
