"""Gate sequences: analytic composite, concatenated pulse simulation, tomography of the composite and
the order dependence of two-gate products."""

import logging

import numpy as np

from qutrit_holonomy.core.errors import ConfigError
from qutrit_holonomy.core.evolution import propagator
from qutrit_holonomy.core.holonomy import (
    analytic_unitary,
    axis_angle,
    commutation_overlap,
    compose,
    compose_sequence,
    logical_block,
)
from qutrit_holonomy.experiments.base import CHI_TILDE_COLUMNS, BaseExperiment, chi_tilde_cells, target_chi_tilde
from qutrit_holonomy.experiments.tables import ResultTable
from qutrit_holonomy.settings import AppConfig
from qutrit_holonomy.tomography.process import reduce_chi
from qutrit_holonomy.tomography.records import process_matrix_document, reduced_matrix_document

logger = logging.getLogger(__name__)

CONSISTENCY_TOLERANCE = 1e-6


class SequenceExperiment(BaseExperiment):
    """Composite of the configured gate sequence, first label applied first."""

    def run(self) -> ResultTable:
        labels = self.config.sequence
        if not labels:
            raise ConfigError("sequence must name at least one gate")
        gates = [self.config.gate(label) for label in labels]
        unitaries = [analytic_unitary(g) for g in gates]
        composite = compose_sequence(unitaries)
        logger.info(f"🚀 Sequence {' -> '.join(labels)}, noise {'on' if self.noisy else 'off'}")

        pulsed = np.eye(3, dtype=complex)
        for g in gates:
            pulsed = propagator(self.gate_pulse(g)) @ pulsed
        deviation = float(np.max(np.abs(logical_block(pulsed) - composite.elements)))
        if deviation > CONSISTENCY_TOLERANCE:
            logger.warning(f"⚠️ Pulsed composite departs from the analytic one by {deviation:.3e}")

        target = target_chi_tilde(composite)
        table = ResultTable(
            name="sequence",
            columns=("model", "sequence", *CHI_TILDE_COLUMNS, "trace", "leakage", "fidelity"),
        )
        models = [("ideal", False)] + ([("noisy", True)] if self.noisy else [])
        for index, (model, noisy) in enumerate(models):
            mode = self.mode(noisy)
            chi = self.reconstruct(self.gate_window(gates, mode), mode, self.point_rng(index))
            table.rows.append((model, composite.label, *chi_tilde_cells(chi, target)))
            table.matrices[f"chi_{model}"] = process_matrix_document(chi, composite.label)
            table.matrices[f"chi_tilde_{model}"] = reduced_matrix_document(reduce_chi(chi), composite.label)
            logger.info(f"🔗 {model} composite {composite.label}: F = {table.rows[-1][-1]:.4f}")
        table.matrices["chi_tilde_target"] = reduced_matrix_document(target, composite.label)

        axis, angle = axis_angle(composite)
        table.summary.update(
            {
                "sequence": labels,
                "composite": composite.elements.real.tolist(),
                "composite_imag": composite.elements.imag.tolist(),
                "pulsed_deviation": deviation,
                "axis": axis.tolist(),
                "angle": angle,
            }
        )
        if len(unitaries) == 2:
            reversed_composite = compose(unitaries[1], unitaries[0])
            overlap = commutation_overlap(composite, reversed_composite)
            reversed_axis, reversed_angle = axis_angle(reversed_composite)
            table.summary.update(
                {"overlap": overlap, "reversed_axis": reversed_axis.tolist(), "reversed_angle": reversed_angle}
            )
            logger.info(f"↔️ Overlap of {composite.label} and {reversed_composite.label}: {overlap:.3e}")
        table.check_bounds()
        return table


def run_sequence(config: AppConfig) -> ResultTable:
    return SequenceExperiment(config=config).run()
