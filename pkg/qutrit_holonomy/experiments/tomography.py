import logging
from pathlib import Path

from qutrit_holonomy.core.qutrit import OperatorBasis9
from qutrit_holonomy.experiments.base import BaseExperiment
from qutrit_holonomy.experiments.tables import ResultTable
from qutrit_holonomy.tomography.process import reduce_chi, trace_preservation_residual
from qutrit_holonomy.tomography.records import MeasurementRecord, process_matrix_document, reduced_matrix_document

logger = logging.getLogger(__name__)


class TomographyExperiment(BaseExperiment):
    """Reconstruct chi from a measurement-records JSON file."""

    records_path: Path

    def run(self) -> ResultTable:
        chi = self.estimate(MeasurementRecord.load(self.records_path))
        chi_tilde = reduce_chi(chi)
        logger.info(f"🧮 {chi.method} estimate from {self.records_path}: tr χ̃ = {chi_tilde.trace:.4f}")
        return ResultTable(
            name="tomography",
            columns=("operator", "chi_diagonal"),
            rows=[(name, float(chi.chi[k, k].real)) for k, name in enumerate(OperatorBasis9.NAMES)],
            matrices={
                "chi": process_matrix_document(chi, self.records_path.stem),
                "chi_tilde": reduced_matrix_document(chi_tilde, self.records_path.stem),
            },
            summary={
                "method": chi.method,
                "trace": chi_tilde.trace,
                "leakage": chi_tilde.leakage,
                "min_eigenvalue": chi.min_eigenvalue,
                "trace_preservation_residual": trace_preservation_residual(chi),
            },
        )
