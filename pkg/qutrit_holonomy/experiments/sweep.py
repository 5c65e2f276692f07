import logging

import numpy as np

from qutrit_holonomy.core.models import GateSpec
from qutrit_holonomy.experiments.base import CHI_TILDE_COLUMNS, BaseExperiment, chi_tilde_cells, gate_target
from qutrit_holonomy.experiments.tables import ResultTable
from qutrit_holonomy.settings import AppConfig
from qutrit_holonomy.tomography.process import reduce_chi
from qutrit_holonomy.tomography.records import process_matrix_document, reduced_matrix_document

logger = logging.getLogger(__name__)

SHAPE_TOLERANCE = 1e-8


class SweepExperiment(BaseExperiment):
    """Process tomography of the holonomic gate across the configured mixing angles.

    Every angle gets a noiseless row (exact tomography with ideal preparation and analysis) and,
    when noise is enabled, a row from master-equation pulses and sampled records.
    """

    def point(self, item: tuple[int, float]) -> list[tuple[tuple, dict, dict]]:
        """Rows of one mixing angle with the chi and chi~ documents behind each."""
        index, theta = item
        phi = self.config.sweep.phi % (2 * np.pi)
        g = GateSpec(theta=theta, phi=phi, label=f"theta_{index}")
        target = gate_target(g)
        results = []
        models = [("ideal", False)] + ([("noisy", True)] if self.noisy else [])
        for model, noisy in models:
            mode = self.mode(noisy)
            chi = self.reconstruct(self.gate_window([g], mode), mode, self.point_rng(index))
            row = (model, theta, phi, *chi_tilde_cells(chi, target))
            documents = process_matrix_document(chi, g.label), reduced_matrix_document(reduce_chi(chi), g.label)
            results.append((row, *documents))
        logger.info(f"🔄 θ = {theta:.4f}: F = {', '.join(f'{row[-1]:.4f}' for row, _, _ in results)}")
        return results

    def run(self) -> ResultTable:
        thetas = self.config.sweep.thetas
        logger.info(f"🚀 Sweep over {len(thetas)} mixing angles, noise {'on' if self.noisy else 'off'}")
        points = self.map_points(self.point, enumerate(thetas))
        table = ResultTable(
            name="sweep",
            columns=("model", "theta", "phi", *CHI_TILDE_COLUMNS, "trace", "leakage", "fidelity"),
            rows=[row for results in points for row, _, _ in results],
        )
        for index, results in enumerate(points):
            for row, chi_document, chi_tilde_document in results:
                table.matrices[f"chi_{row[0]}_{index}"] = chi_document
                table.matrices[f"chi_tilde_{row[0]}_{index}"] = chi_tilde_document
        table.summary["shape_deviation"] = shape_deviation(table)
        table.check_bounds()
        return table


def shape_deviation(table: ResultTable) -> float:
    """Largest departure of the noiseless diagonals from chi_ZZ = cos^2 theta, chi_XX + chi_YY = sin^2 theta."""
    deviation = 0.0
    for record in table.records():
        if record["model"] != "ideal":
            continue
        theta = record["theta"]
        deviation = max(
            deviation,
            abs(record["chi_ZZ"] - np.cos(theta) ** 2),
            abs(record["chi_XX"] + record["chi_YY"] - np.sin(theta) ** 2),
        )
    if deviation > SHAPE_TOLERANCE:
        logger.warning(f"⚠️ Noiseless sweep departs from the cos²θ/sin²θ shape by {deviation:.3e}")
    return float(deviation)


def run_sweep(config: AppConfig) -> ResultTable:
    return SweepExperiment(config=config).run()
