"""Result tables: ordered rows plus matrix documents and scalar summaries, written as CSV and JSON."""

import csv
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, model_validator

logger = logging.getLogger(__name__)

BOUNDED_COLUMNS = ("trace", "fidelity")
BOUND_SLACK = 1e-8


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def format_cell(value: Any) -> str:
    """Stable text for a cell: floats with 15 significant digits, everything else as str."""
    value = _plain(value)
    if isinstance(value, float):
        return format(value, ".15g")
    return str(value)


class ResultTable(BaseModel):
    """Rows of one experiment with the matrices and summary values it produced."""

    name: str = Field(description="Base name of the files written for this table")
    columns: tuple[str, ...] = Field(description="Column names in row order")
    rows: list[tuple[Any, ...]] = Field(default_factory=list, description="Rows in input-grid order")
    matrices: dict[str, dict] = Field(default_factory=dict, description="JSON matrix documents by name")
    summary: dict[str, Any] = Field(default_factory=dict, description="Scalar results that are not rows")

    @model_validator(mode="after")
    def _rows_match_columns(self) -> "ResultTable":
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row} has {len(row)} cells for {len(self.columns)} columns")
        return self

    def column(self, name: str) -> list[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def records(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, (_plain(v) for v in row))) for row in self.rows]

    def check_bounds(self) -> list[str]:
        """Cells of trace or fidelity columns outside [0, 1 + 1e-8]; each is logged as a warning."""
        problems = []
        for column in self.columns:
            if not column.endswith(BOUNDED_COLUMNS):
                continue
            for value in self.column(column):
                if isinstance(value, (float, np.floating)) and not -BOUND_SLACK <= value <= 1 + BOUND_SLACK:
                    problems.append(f"{column}={value:.10f}")
        for problem in problems:
            logger.warning(f"⚠️ {self.name}: {problem} lies outside [0, 1]")
        return problems

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.columns)
            writer.writerows([format_cell(v) for v in row] for row in self.rows)
        return path

    def write(self, output_dir: str | Path) -> list[Path]:
        """CSV table, one JSON file per matrix document and a JSON summary; returns the written paths."""
        output_dir = Path(output_dir)
        written = [self.write_csv(output_dir / f"{self.name}.csv")]
        for key, document in self.matrices.items():
            path = output_dir / f"{self.name}_{key}.json"
            with open(path, "w", encoding="utf-8") as f:
                json.dump(document, f, indent=2, ensure_ascii=False)
            written.append(path)
        if self.summary:
            path = output_dir / f"{self.name}_summary.json"
            with open(path, "w", encoding="utf-8") as f:
                json.dump({k: _plain(v) for k, v in self.summary.items()}, f, indent=2, ensure_ascii=False)
            written.append(path)
        return written
