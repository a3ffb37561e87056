"""Reading and grouping of sweep CSV logs.

The expected schema is the fixed header written by the ``icllab`` harness:
parameter columns, per-replicate simulation values, repeated theory columns,
and a trailing ``error`` tag column.  This module is deliberately independent
of the producing package: it consumes only the documented CSV layout.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    """The CSV does not conform to the expected sweep schema."""


REQUIRED_COLUMNS = (
    "tau",
    "alpha",
    "kappa",
    "rho",
    "lambda",
    "mode",
    "e_icl",
    "e_idg",
    "e_icl_theory",
    "e_idg_theory",
    "error",
)


@dataclass
class SweepTable:
    """Parsed rows of one sweep CSV, split into theory and simulation rows."""

    columns: list[str]
    rows: list[dict]

    @property
    def theory_rows(self) -> list[dict]:
        return [r for r in self.rows if r["mode"] == "theory"]

    @property
    def sim_rows(self) -> list[dict]:
        return [r for r in self.rows if r["mode"] != "theory" and not r["error"]]

    def require_columns(self, names) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise SchemaError(f"CSV is missing required columns: {missing}")


def _parse_cell(value: str):
    if value == "":
        return None
    try:
        return float(value)
    except ValueError:
        return value


def load_table(path: str | Path) -> SweepTable:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path} is empty")
        columns = list(reader.fieldnames)
        missing = [c for c in REQUIRED_COLUMNS if c not in columns]
        if missing:
            raise SchemaError(f"{path} is missing columns: {missing}")
        rows = []
        for raw in reader:
            row = {k: _parse_cell(v) for k, v in raw.items()}
            row["mode"] = raw["mode"]
            row["error"] = raw["error"]
            rows.append(row)
    return SweepTable(columns=columns, rows=rows)


@dataclass
class Series:
    """One plottable series: x positions with values (and optional spread)."""

    x: np.ndarray
    y: np.ndarray
    yerr: np.ndarray | None = None


def theory_series(
    table: SweepTable, x_axis: str, y_column: str
) -> tuple[Series, list[float]]:
    """Theory line over the grid; returns the series plus the x positions of
    divergent grid points (to be drawn as axis breaks)."""
    xs, ys, breaks = [], [], []
    for row in table.theory_rows:
        if row["error"] == "divergent":
            breaks.append(row[x_axis])
        elif row.get(y_column) is not None:
            xs.append(row[x_axis])
            ys.append(row[y_column])
    order = np.argsort(xs)
    return Series(np.asarray(xs)[order], np.asarray(ys)[order]), breaks


def sim_series(table: SweepTable, x_axis: str, y_column: str) -> Series:
    """Simulation points: mean with standard-deviation bars per grid value."""
    grouped = defaultdict(list)
    for row in table.sim_rows:
        if row.get(y_column) is not None:
            grouped[row[x_axis]].append(row[y_column])
    xs = sorted(grouped)
    means = np.array([np.mean(grouped[x]) for x in xs])
    stds = np.array(
        [np.std(grouped[x], ddof=1) if len(grouped[x]) > 1 else 0.0 for x in xs]
    )
    return Series(np.asarray(xs), means, stds)


def add_gap_column(table: SweepTable) -> None:
    """Derive theory g_task = e_icl_theory - e_idg_theory where available."""
    for row in table.rows:
        a, b = row.get("e_icl_theory"), row.get("e_idg_theory")
        row["g_task_theory"] = a - b if a is not None and b is not None else None
