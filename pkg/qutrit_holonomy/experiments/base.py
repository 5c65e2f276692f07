"""Shared machinery of the experiments: tomography mode from the config, gate windows, channel
reconstruction, concurrent evaluation of grid points and the JSON run log."""

import asyncio
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Callable, ClassVar, Iterable, TypeVar

import numpy as np
from pydantic import BaseModel, Field

from qutrit_holonomy.core.holonomy import analytic_unitary, embed_logical, gate_pulse
from qutrit_holonomy.core.models import GateSpec, LogicalUnitary, ProcessMatrix, ReducedProcessMatrix
from qutrit_holonomy.core.pulses import PulseSpec
from qutrit_holonomy.experiments.tables import ResultTable
from qutrit_holonomy.settings import AppConfig
from qutrit_holonomy.tomography.mle import mle_reconstruct
from qutrit_holonomy.tomography.preparation import TomographyMode, gap_superoperator, pulse_superoperator
from qutrit_holonomy.tomography.process import (
    chi_from_unitary,
    collect_records,
    linear_process_estimate,
    process_fidelity,
    reduce_chi,
    superoperator_channel,
)
from qutrit_holonomy.tomography.records import MeasurementRecord
from qutrit_holonomy.tomography.state import assert_informationally_complete

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

CHI_TILDE_COLUMNS = ("chi_II", "chi_XX", "chi_YY", "chi_ZZ")


class BaseExperiment(BaseModel):
    """Class to provide experiment running capabilities."""

    model_config = {"arbitrary_types_allowed": True}

    experiment_name: ClassVar[str] = None
    description: ClassVar[str] = None

    config: AppConfig = Field(default_factory=AppConfig, description="Validated experiment configuration")

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        cls.experiment_name = cls.experiment_name or cls.__name__.lower().removesuffix("experiment")
        cls.description = cls.description or cls.__doc__ or ""

    def model_post_init(self, __context) -> None:
        assert_informationally_complete()

    def run(self) -> ResultTable:
        raise NotImplementedError("run must be implemented by subclass")

    @property
    def noisy(self) -> bool:
        return self.config.noise.enabled

    def mode(self, noisy: bool | None = None) -> TomographyMode:
        """Ideal rotations for the noiseless model; master-equation pulses, gaps included, otherwise."""
        noisy = self.noisy if noisy is None else noisy
        if not noisy:
            return TomographyMode.ideal()
        pulse, tomography = self.config.pulse, self.config.tomography
        return TomographyMode.pulsed(
            noise=self.config.noise.to_model(),
            sigma=pulse.sigma,
            pulse_length=pulse.length,
            gap=pulse.gap,
            time_step=pulse.dt,
            lindblad_step=pulse.lindblad_dt,
            prep_slots=tomography.prep_slots,
            analysis_slots=tomography.analysis_slots,
        )

    def gate_pulse(self, g: GateSpec) -> PulseSpec:
        pulse = self.config.pulse
        return gate_pulse(g, pulse.sigma, pulse.length, pulse.dt)

    def gate_window(self, gates: Iterable[GateSpec], mode: TomographyMode) -> np.ndarray:
        """Transfer matrix of the gate pulses played in order, each preceded and the last followed by a gap."""
        gap = gap_superoperator(mode)
        total = gap
        for g in gates:
            total = gap @ pulse_superoperator(mode, self.gate_pulse(g)) @ total
        return total

    def reconstruct(self, superoperator: np.ndarray, mode: TomographyMode, rng: np.random.Generator) -> ProcessMatrix:
        """Process tomography of ``superoperator``: exact records in ideal mode, sampled ones otherwise."""
        tomography = self.config.tomography
        shots = None if mode.is_ideal else tomography.shots
        records = collect_records(superoperator_channel(superoperator), shots, rng, mode, tomography.seed)
        return self.estimate(records)

    def estimate(self, records: MeasurementRecord) -> ProcessMatrix:
        """Linear inversion of exact records; maximum likelihood otherwise, raising NotConverged at the cap."""
        if records.exact:
            return linear_process_estimate(records)
        tomography = self.config.tomography
        return mle_reconstruct(records, tomography.mle_max_iterations, tomography.mle_tolerance, strict=True)

    def point_rng(self, index: int) -> np.random.Generator:
        """Generator of grid point ``index``, independent of evaluation order."""
        return np.random.default_rng([self.config.tomography.seed, index])

    def map_points(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """``fn`` over ``items``, batched over ``max_workers`` threads; results keep input order."""
        items = list(items)
        workers = self.config.execution.max_workers
        if workers == 1 or len(items) < 2:
            return [fn(item) for item in items]
        return asyncio.run(self._gather(fn, items, workers))

    async def _gather(self, fn: Callable[[T], R], items: list[T], batch_size: int) -> list[R]:
        results: list[R] = []
        total_batches = (len(items) + batch_size - 1) // batch_size
        for batch_idx, i in enumerate(range(0, len(items), batch_size), start=1):
            logger.debug(f"Batch {batch_idx}/{total_batches} (points {i + 1}-{min(i + batch_size, len(items))})")
            results.extend(await asyncio.gather(*[asyncio.to_thread(fn, item) for item in items[i : i + batch_size]]))
        return results

    def save(self, table: ResultTable, output_dir: str | Path | None = None) -> list[Path]:
        """Write the table files and a timestamped run log next to them."""
        output_dir = Path(output_dir or self.config.execution.output_dir)
        written = table.write(output_dir)
        log_path = output_dir / f"{datetime.now().strftime('%Y%m%d-%H%M%S')}-{self.experiment_name}-log.json"
        run_log = {
            "experiment": self.experiment_name,
            "description": self.description.strip(),
            "config": self.config.model_dump(mode="json"),
            "summary": json.loads(json.dumps(table.summary, default=_json_default)),
            "files": [str(path) for path in written],
        }
        with open(log_path, "w", encoding="utf-8") as f:
            json.dump(run_log, f, indent=2, ensure_ascii=False)
        logger.info(f"💾 {self.experiment_name}: {len(written)} files written to {output_dir}")
        return [*written, log_path]


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serialisable")


def target_chi_tilde(u: LogicalUnitary) -> ReducedProcessMatrix:
    return reduce_chi(chi_from_unitary(embed_logical(u)))


def gate_target(g: GateSpec) -> ReducedProcessMatrix:
    return target_chi_tilde(analytic_unitary(g))


def chi_tilde_cells(chi_exp: ProcessMatrix, target: ReducedProcessMatrix) -> tuple[float, ...]:
    """Diagonal of chi~, its trace, leakage and fidelity to ``target``."""
    chi_tilde = reduce_chi(chi_exp)
    diagonal = tuple(float(v) for v in chi_tilde.diagonal)
    return (*diagonal, chi_tilde.trace, chi_tilde.leakage, process_fidelity(chi_tilde, target))
