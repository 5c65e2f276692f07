import logging

import numpy as np

from qutrit_holonomy.core.errors import InitialStateLeaked
from qutrit_holonomy.core.evolution import CollapseSet
from qutrit_holonomy.core.holonomy import analytic_unitary, bloch_trajectory, compose_sequence, logical_bloch_vector
from qutrit_holonomy.core.models import GROUND, UPPER, QutritState
from qutrit_holonomy.experiments.base import BaseExperiment
from qutrit_holonomy.experiments.tables import ResultTable
from qutrit_holonomy.settings import AppConfig, logical_state

logger = logging.getLogger(__name__)

LEAKED_POPULATION = 1e-12
ENDPOINT_TOLERANCE = 1e-6


class BlochExperiment(BaseExperiment):
    """Logical Bloch vector sampled while the gate sequence plays on the initial state."""

    initial: QutritState | None = None

    def run(self) -> ResultTable:
        initial = self.initial if self.initial is not None else logical_state(self.config.bloch.initial)
        if initial.aux_population > LEAKED_POPULATION:
            raise InitialStateLeaked(initial.aux_population)
        labels = self.config.sequence
        gates = [self.config.gate(label) for label in labels]
        pulses = [self.gate_pulse(g) for g in gates]
        noise = self.config.noise.to_model()
        collapse = CollapseSet.from_noise(noise) if noise is not None else None
        time_step = self.config.pulse.lindblad_dt if noise is not None else None
        logger.info(f"🚀 Bloch trajectory of {' -> '.join(labels)}, noise {'on' if self.noisy else 'off'}")

        times, vectors, aux = bloch_trajectory(initial, pulses, collapse, time_step)
        keep = np.zeros(len(times), dtype=bool)
        keep[:: self.config.bloch.sample_every] = True
        keep[-1] = True

        composite = compose_sequence([analytic_unitary(g) for g in gates])
        expected = logical_bloch_vector(composite.act(initial.amplitudes[[GROUND, UPPER]]))
        endpoint_error = float(np.max(np.abs(vectors[-1] - expected)))
        if not self.noisy and endpoint_error > ENDPOINT_TOLERANCE:
            logger.warning(f"⚠️ Trajectory endpoint misses the analytic one by {endpoint_error:.3e}")

        table = ResultTable(
            name="bloch",
            columns=("time", "x", "y", "z", "aux_population"),
            rows=[
                (float(t), *(float(c) for c in v), float(p))
                for t, v, p in zip(times[keep], vectors[keep], aux[keep])
            ],
            summary={
                "sequence": labels,
                "initial": initial.amplitudes.real.tolist(),
                "initial_imag": initial.amplitudes.imag.tolist(),
                "endpoint": vectors[-1].tolist(),
                "expected_endpoint": expected.tolist(),
                "endpoint_error": endpoint_error,
            },
        )
        logger.info(f"🎯 Endpoint {np.round(vectors[-1], 6).tolist()}, analytic {np.round(expected, 6).tolist()}")
        return table


def export_bloch(config: AppConfig, initial: QutritState) -> ResultTable:
    return BlochExperiment(config=config, initial=initial).run()
