"""Core modules: three-level algebra, pulses, evolution and holonomic gates."""

from qutrit_holonomy.core.errors import (
    ConfigError,
    DegenerateEnvelope,
    DegenerateRotation,
    DimensionMismatch,
    InfeasibleRecords,
    InitialStateLeaked,
    MalformedRecords,
    NonHermitianInput,
    NonUnitaryResult,
    NotConverged,
    NumericalError,
    QutritHolonomyError,
    ReconstructionSingular,
    SingularBasis,
    StepTooCoarse,
    ValidationFailure,
)
from qutrit_holonomy.core.evolution import (
    CollapseSet,
    DephasingForm,
    InteractionHamiltonian,
    NoiseModel,
    RatioRamp,
    closed_form_propagator,
    lindblad_evolve,
    lindblad_superoperator,
    parallel_transport_residual,
    propagator,
    time_ordered_propagator,
    trajectory,
)
from qutrit_holonomy.core.holonomy import (
    NAMED_GATES,
    analytic_unitary,
    axis_angle,
    bloch_vector,
    commutation_overlap,
    compose,
    compose_sequence,
    embed_logical,
    gate_drive,
    gate_pulse,
    logical_block,
)
from qutrit_holonomy.core.models import (
    AUX,
    GROUND,
    UPPER,
    DensityMatrix,
    GateSpec,
    LogicalUnitary,
    ProcessMatrix,
    QutritState,
    ReducedProcessMatrix,
)
from qutrit_holonomy.core.pulses import (
    Axis,
    DriveConfig,
    GaussianEnvelope,
    PulseSpec,
    Transition,
    angles_from_drive,
    calibrate_peak,
    calibrated_pulse,
    drive_from_angles,
    envelope_value,
    pulse_area,
    rotation_pulse,
)
from qutrit_holonomy.core.qutrit import (
    LogicalBasis4,
    OperatorBasis9,
    dagger,
    decompose,
    expm_hermitian,
    ketbra,
    logical_basis,
    operator_basis,
    recompose,
)

__all__ = [
    # Errors
    "QutritHolonomyError",
    "ValidationFailure",
    "NumericalError",
    "ConfigError",
    "NonHermitianInput",
    "DegenerateEnvelope",
    "DimensionMismatch",
    "InitialStateLeaked",
    "MalformedRecords",
    "SingularBasis",
    "NonUnitaryResult",
    "StepTooCoarse",
    "DegenerateRotation",
    "ReconstructionSingular",
    "InfeasibleRecords",
    "NotConverged",
    # Models
    "GROUND",
    "AUX",
    "UPPER",
    "QutritState",
    "DensityMatrix",
    "GateSpec",
    "LogicalUnitary",
    "ProcessMatrix",
    "ReducedProcessMatrix",
    # Algebra
    "OperatorBasis9",
    "LogicalBasis4",
    "operator_basis",
    "logical_basis",
    "decompose",
    "recompose",
    "expm_hermitian",
    "dagger",
    "ketbra",
    # Pulses
    "GaussianEnvelope",
    "DriveConfig",
    "PulseSpec",
    "Transition",
    "Axis",
    "envelope_value",
    "pulse_area",
    "calibrate_peak",
    "calibrated_pulse",
    "drive_from_angles",
    "angles_from_drive",
    "rotation_pulse",
    # Evolution
    "InteractionHamiltonian",
    "RatioRamp",
    "NoiseModel",
    "DephasingForm",
    "CollapseSet",
    "time_ordered_propagator",
    "propagator",
    "closed_form_propagator",
    "parallel_transport_residual",
    "lindblad_evolve",
    "lindblad_superoperator",
    "trajectory",
    # Gates
    "NAMED_GATES",
    "analytic_unitary",
    "embed_logical",
    "logical_block",
    "compose",
    "compose_sequence",
    "commutation_overlap",
    "axis_angle",
    "gate_drive",
    "gate_pulse",
    "bloch_vector",
]
