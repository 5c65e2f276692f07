"""Exception hierarchy shared by the simulator, the tomography pipeline and the CLI.

The CLI maps ``ValidationFailure`` to exit code 2 and ``NumericalError`` to exit code 3.
"""

from __future__ import annotations

from typing import Any


class QutritHolonomyError(Exception):
    """Base class for all errors raised by qutrit_holonomy."""


class ValidationFailure(QutritHolonomyError):
    """Input rejected before any numerical work was done."""


class NumericalError(QutritHolonomyError):
    """A numerical kernel could not deliver a result within its tolerance."""


class ConfigError(ValidationFailure):
    """Experiment configuration could not be loaded or validated."""

    def __init__(self, message: str, problems: list[str] | None = None):
        self.problems = problems or []
        details = "".join(f"\n  - {p}" for p in self.problems)
        super().__init__(f"{message}{details}")


class NonHermitianInput(ValidationFailure):
    def __init__(self, asymmetry: float, tolerance: float):
        self.asymmetry = asymmetry
        super().__init__(f"Generator is not Hermitian: |h - h†| = {asymmetry:.3e} > {tolerance:.1e}")


class DegenerateEnvelope(ValidationFailure):
    pass


class DimensionMismatch(ValidationFailure):
    def __init__(self, left: tuple[int, ...], right: tuple[int, ...]):
        super().__init__(f"Process matrices have different shapes: {left} vs {right}")


class InitialStateLeaked(ValidationFailure):
    def __init__(self, population: float):
        self.population = population
        super().__init__(f"Initial state has |e> population {population:.3e}; it must lie in the logical subspace")


class MalformedRecords(ValidationFailure):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Measurement records in {path} are not valid JSON: {reason}")


class SingularBasis(NumericalError):
    pass


class NonUnitaryResult(NumericalError):
    def __init__(self, deviation: float, time_step: float):
        self.deviation = deviation
        super().__init__(f"Propagator lost unitarity (|U†U - I| = {deviation:.3e}) at time step {time_step} ns")


class StepTooCoarse(NumericalError):
    pass


class DegenerateRotation(NumericalError):
    pass


class ReconstructionSingular(NumericalError):
    pass


class InfeasibleRecords(NumericalError):
    pass


class NotConverged(NumericalError):
    """Raised by strict callers; ``result`` holds the best iterate reached."""

    def __init__(self, message: str, result: Any = None):
        self.result = result
        super().__init__(message)
