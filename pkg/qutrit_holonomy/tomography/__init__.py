"""Three-level state and process tomography."""

from qutrit_holonomy.tomography.choi import chi_to_choi, choi_to_chi, choi_to_superoperator, superoperator_to_choi
from qutrit_holonomy.tomography.mle import MLEResult, mle_fit, mle_reconstruct
from qutrit_holonomy.tomography.preparation import (
    ANALYSIS_SETTINGS,
    AnalysisSetting,
    InputStateSet,
    Rotation,
    TomographyMode,
    input_state_set,
    prepare_input,
)
from qutrit_holonomy.tomography.process import (
    apply_chi,
    chi_from_superoperator,
    chi_from_unitary,
    collect_records,
    leakage,
    linear_process_estimate,
    process_fidelity,
    process_tomography,
    reduce_chi,
    superoperator_channel,
    unitary_channel,
)
from qutrit_holonomy.tomography.records import MeasurementRecord
from qutrit_holonomy.tomography.state import linear_inversion, measure, state_fidelity, state_tomography

__all__ = [
    "Rotation",
    "AnalysisSetting",
    "ANALYSIS_SETTINGS",
    "InputStateSet",
    "TomographyMode",
    "input_state_set",
    "prepare_input",
    "measure",
    "linear_inversion",
    "state_tomography",
    "state_fidelity",
    "MeasurementRecord",
    "collect_records",
    "process_tomography",
    "linear_process_estimate",
    "MLEResult",
    "mle_fit",
    "mle_reconstruct",
    "chi_from_unitary",
    "chi_from_superoperator",
    "apply_chi",
    "reduce_chi",
    "leakage",
    "process_fidelity",
    "chi_to_choi",
    "choi_to_chi",
    "superoperator_to_choi",
    "choi_to_superoperator",
    "unitary_channel",
    "superoperator_channel",
]
