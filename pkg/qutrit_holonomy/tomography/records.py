"""Measurement records and process matrices as JSON documents.

Complex numbers are written as [re, im] pairs, matrices row-major, and every document carries a
top-level "basis" field naming the operator order of the nine-element basis.
"""

import json
import logging
from pathlib import Path
from typing import Any, ClassVar

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from qutrit_holonomy.core.errors import MalformedRecords
from qutrit_holonomy.core.models import ProcessMatrix, ReducedProcessMatrix
from qutrit_holonomy.core.qutrit import LogicalBasis4, OperatorBasis9

logger = logging.getLogger(__name__)

INPUTS = 9
SETTINGS = 9
OUTCOMES = 3


def complex_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def complex_from_json(value: Any) -> np.ndarray:
    pairs = np.asarray(value, dtype=float)
    if pairs.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return pairs[..., 0] + 1j * pairs[..., 1]


class MeasurementRecord(BaseModel):
    """Outcome probabilities (exact mode) or counts (sampled mode) per input state and analysis setting."""

    model_config = {"frozen": True, "arbitrary_types_allowed": True}

    SUM_TOLERANCE: ClassVar[float] = 1e-12

    basis: tuple[str, ...] = Field(default=OperatorBasis9.NAMES, description="Operator order of chi")
    probabilities: np.ndarray | None = Field(default=None, description="Shape (inputs, settings, outcomes)")
    counts: np.ndarray | None = Field(default=None, description="Shape (inputs, settings, outcomes)")
    shots: int | None = Field(default=None, gt=0, description="Shots per setting; None for exact records")
    seed: int | None = Field(default=None, description="Seed of the sampling generator")

    @field_validator("probabilities", mode="before")
    @classmethod
    def _probabilities_array(cls, value: Any) -> np.ndarray | None:
        if value is None:
            return None
        array = np.array(value, dtype=float)
        if array.shape != (INPUTS, SETTINGS, OUTCOMES):
            raise ValueError(f"probabilities must have shape {(INPUTS, SETTINGS, OUTCOMES)}, got {array.shape}")
        array.flags.writeable = False
        return array

    @field_validator("counts", mode="before")
    @classmethod
    def _counts_array(cls, value: Any) -> np.ndarray | None:
        if value is None:
            return None
        array = np.array(value)
        if array.shape != (INPUTS, SETTINGS, OUTCOMES):
            raise ValueError(f"counts must have shape {(INPUTS, SETTINGS, OUTCOMES)}, got {array.shape}")
        if not np.all(np.equal(np.mod(array, 1), 0)) or np.any(array < 0):
            raise ValueError("counts must be nonnegative integers")
        array = array.astype(np.int64)
        array.flags.writeable = False
        return array

    @model_validator(mode="after")
    def _consistent(self) -> "MeasurementRecord":
        if (self.probabilities is None) == (self.counts is None):
            raise ValueError("a record holds either probabilities or counts")
        if self.probabilities is not None:
            if np.any(self.probabilities < 0) or np.any(self.probabilities > 1):
                raise ValueError("probabilities must lie in [0, 1]")
            if np.max(np.abs(self.probabilities.sum(axis=-1) - 1.0)) > self.SUM_TOLERANCE:
                raise ValueError("probabilities of each setting must sum to 1")
        else:
            if self.shots is None:
                raise ValueError("counts require a shot number")
            if np.any(self.counts.sum(axis=-1) != self.shots):
                raise ValueError(f"counts of each setting must sum to {self.shots}")
        return self

    @property
    def exact(self) -> bool:
        return self.probabilities is not None

    @property
    def frequencies(self) -> np.ndarray:
        return self.probabilities if self.exact else self.counts / self.shots

    @property
    def weights(self) -> np.ndarray:
        """Likelihood weights: counts, or probabilities for infinite-shot records."""
        return self.probabilities if self.exact else self.counts.astype(float)

    def to_json(self) -> dict:
        document = {"basis": list(self.basis), "shots": self.shots, "seed": self.seed}
        if self.exact:
            document["probabilities"] = self.probabilities.tolist()
        else:
            document["counts"] = self.counts.tolist()
        return document

    @classmethod
    def from_json(cls, document: dict) -> "MeasurementRecord":
        return cls.model_validate(document)

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, indent=2)
        return path

    @classmethod
    def load(cls, path: str | Path) -> "MeasurementRecord":
        with open(path, "r", encoding="utf-8") as f:
            try:
                document = json.load(f)
            except ValueError as e:
                raise MalformedRecords(str(path), str(e)) from e
        return cls.from_json(document)


def process_matrix_document(chi: ProcessMatrix, label: str = "") -> dict:
    return {"basis": list(OperatorBasis9.NAMES), "label": label, "method": chi.method, "chi": complex_to_json(chi.chi)}


def reduced_matrix_document(chi_tilde: ReducedProcessMatrix, label: str = "") -> dict:
    return {
        "basis": list(LogicalBasis4.NAMES),
        "label": label,
        "trace": chi_tilde.trace,
        "chi_tilde": complex_to_json(chi_tilde.chi_tilde),
    }


def load_process_matrix(document: dict) -> ProcessMatrix:
    if tuple(document.get("basis", ())) != OperatorBasis9.NAMES:
        raise ValueError(f"unsupported basis order {document.get('basis')}")
    return ProcessMatrix(chi=complex_from_json(document["chi"]), method=document.get("method", "linear"))
