"""Config-driven experiments and the mapping from CLI subcommand to experiment class."""

from qutrit_holonomy.experiments.base import BaseExperiment
from qutrit_holonomy.experiments.bloch import BlochExperiment, export_bloch
from qutrit_holonomy.experiments.sequence import SequenceExperiment, run_sequence
from qutrit_holonomy.experiments.sweep import SweepExperiment, run_sweep
from qutrit_holonomy.experiments.tables import ResultTable
from qutrit_holonomy.experiments.tomography import TomographyExperiment

# Mapping of CLI subcommands to their experiment classes
EXPERIMENT_MAPPING: dict[str, type[BaseExperiment]] = {
    experiment.experiment_name: experiment
    for experiment in (SweepExperiment, SequenceExperiment, BlochExperiment, TomographyExperiment)
}

__all__ = [
    "BaseExperiment",
    "SweepExperiment",
    "SequenceExperiment",
    "BlochExperiment",
    "TomographyExperiment",
    "EXPERIMENT_MAPPING",
    "ResultTable",
    "run_sweep",
    "run_sequence",
    "export_bloch",
]
