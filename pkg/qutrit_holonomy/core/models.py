import logging
from typing import Any, ClassVar, Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

logger = logging.getLogger(__name__)

# Level indices in every 3x3 matrix of the package: ground, auxiliary, second excited.
GROUND, AUX, UPPER = 0, 1, 2
LEVEL_LABELS = ("0", "e", "1")
LOGICAL_LEVELS = (GROUND, UPPER)


def frozen_array(value: Any, shape: tuple[int, ...]) -> np.ndarray:
    """Copy ``value`` into a read-only complex array of the given shape."""
    array = np.array(value, dtype=complex)
    if array.shape != shape:
        raise ValueError(f"expected an array of shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("array contains non-finite entries")
    array.flags.writeable = False
    return array


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def unitary_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


class QutritState(BaseModel):
    """Pure state of the three-level atom, amplitudes ordered (|0>, |e>, |1>)."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    NORM_TOLERANCE: ClassVar[float] = 1e-12

    amplitudes: np.ndarray = Field(description="Three complex amplitudes")

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        return frozen_array(value, (3,))

    @field_validator("amplitudes")
    @classmethod
    def _normalized(cls, value: np.ndarray) -> np.ndarray:
        norm = float(np.sum(np.abs(value) ** 2))
        if abs(norm - 1.0) > cls.NORM_TOLERANCE:
            raise ValueError(f"state norm is {norm!r}, expected 1")
        return value

    @classmethod
    def basis(cls, level: int) -> "QutritState":
        amplitudes = np.zeros(3, dtype=complex)
        amplitudes[level] = 1.0
        return cls(amplitudes=amplitudes)

    @classmethod
    def superposition(cls, first: int, second: int, phase: complex = 1.0) -> "QutritState":
        """(|first> + phase |second>) / sqrt(2)."""
        amplitudes = np.zeros(3, dtype=complex)
        amplitudes[first] = 1.0
        amplitudes[second] += phase
        return cls(amplitudes=amplitudes / np.sqrt(2.0))

    @classmethod
    def normalized(cls, amplitudes: Any) -> "QutritState":
        vector = np.asarray(amplitudes, dtype=complex)
        return cls(amplitudes=vector / np.linalg.norm(vector))

    @property
    def aux_population(self) -> float:
        return float(abs(self.amplitudes[AUX]) ** 2)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(elements=np.outer(self.amplitudes, self.amplitudes.conj()))


class DensityMatrix(BaseModel):
    """3x3 density operator; Hermitian, unit trace, positive semidefinite."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    HERMITIAN_TOLERANCE: ClassVar[float] = 1e-12
    TRACE_TOLERANCE: ClassVar[float] = 1e-12
    EIGENVALUE_FLOOR: ClassVar[float] = -1e-10

    elements: np.ndarray = Field(description="3x3 complex matrix")

    @field_validator("elements", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        return frozen_array(value, (3, 3))

    @field_validator("elements")
    @classmethod
    def _physical(cls, value: np.ndarray) -> np.ndarray:
        if hermitian_deviation(value) > cls.HERMITIAN_TOLERANCE:
            raise ValueError("density matrix is not Hermitian")
        trace = np.trace(value).real
        if abs(trace - 1.0) > cls.TRACE_TOLERANCE:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        smallest = float(np.linalg.eigvalsh(value)[0])
        if smallest < cls.EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {smallest:.3e}")
        return value

    @classmethod
    def trusted(cls, elements: np.ndarray) -> "DensityMatrix":
        """Wrap a matrix whose physicality the caller has already checked with its own tolerances."""
        hermitian = (np.asarray(elements, dtype=complex) + np.asarray(elements, dtype=complex).conj().T) / 2
        return cls.model_construct(elements=frozen_array(hermitian, (3, 3)))

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(elements=np.eye(3) / 3)

    def population(self, level: int) -> float:
        return float(self.elements[level, level].real)

    def fidelity_to_pure(self, state: QutritState) -> float:
        return float(np.real(state.amplitudes.conj() @ self.elements @ state.amplitudes))


class GateSpec(BaseModel):
    """Holonomic gate parameters; the cyclic evolution realises U(theta, phi) on (|0>, |1>)."""

    model_config = {"frozen": True}

    theta: float = Field(ge=0.0, le=np.pi, description="Mixing angle (rad)")
    phi: float = Field(ge=0.0, lt=2 * np.pi, description="Relative drive phase (rad)")
    label: str = Field(default="", description="Human readable gate name, e.g. H or NOT")

    def __str__(self):
        return f"{self.label or 'U'}(θ={self.theta:.4f}, φ={self.phi:.4f})"


class LogicalUnitary(BaseModel):
    """2x2 unitary acting on the logical pair (|0>, |1>)."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    UNITARY_TOLERANCE: ClassVar[float] = 1e-10

    elements: np.ndarray = Field(description="2x2 complex matrix")
    label: str = Field(default="", description="Optional name carried into result tables")

    @field_validator("elements", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        return frozen_array(value, (2, 2))

    @field_validator("elements")
    @classmethod
    def _unitary(cls, value: np.ndarray) -> np.ndarray:
        deviation = unitary_deviation(value)
        if deviation > cls.UNITARY_TOLERANCE:
            raise ValueError(f"matrix is not unitary (deviation {deviation:.3e})")
        return value

    def __matmul__(self, other: "LogicalUnitary") -> "LogicalUnitary":
        return LogicalUnitary(elements=self.elements @ other.elements)

    def act(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.elements @ np.asarray(amplitudes, dtype=complex)


class ProcessMatrix(BaseModel):
    """Process matrix chi over the nine-operator basis: E(rho) = sum_mn chi_mn P_m rho P_n^dagger."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    HERMITIAN_TOLERANCE: ClassVar[float] = 1e-8

    chi: np.ndarray = Field(description="9x9 complex matrix")
    method: Literal["linear", "mle", "analytic"] = Field(default="linear", description="How chi was obtained")

    @field_validator("chi", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        return frozen_array(value, (9, 9))

    @field_validator("chi")
    @classmethod
    def _hermitian(cls, value: np.ndarray) -> np.ndarray:
        deviation = hermitian_deviation(value)
        if deviation > cls.HERMITIAN_TOLERANCE:
            raise ValueError(f"chi is not Hermitian (deviation {deviation:.3e})")
        return value

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.chi + self.chi.conj().T) / 2)[0])


class ReducedProcessMatrix(BaseModel):
    """4x4 restriction of chi to the logical operators {I, X, Y~, Z}; 1 - trace is the leakage."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    TRACE_CEILING: ClassVar[float] = 1 + 1e-8

    chi_tilde: np.ndarray = Field(description="4x4 complex matrix")

    @field_validator("chi_tilde", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        return frozen_array(value, (4, 4))

    @field_validator("chi_tilde")
    @classmethod
    def _hermitian(cls, value: np.ndarray) -> np.ndarray:
        deviation = hermitian_deviation(value)
        if deviation > ProcessMatrix.HERMITIAN_TOLERANCE:
            raise ValueError(f"reduced chi is not Hermitian (deviation {deviation:.3e})")
        return value

    @model_validator(mode="after")
    def _trace_bound(self) -> "ReducedProcessMatrix":
        # Finite-shot estimates of a leakage-free process scatter around 1, so this only warns.
        if self.trace > self.TRACE_CEILING:
            logger.warning(f"Reduced process matrix trace {self.trace:.6f} exceeds 1")
        return self

    @property
    def trace(self) -> float:
        return float(np.trace(self.chi_tilde).real)

    @property
    def leakage(self) -> float:
        return 1.0 - self.trace

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.chi_tilde))
