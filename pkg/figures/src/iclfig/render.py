"""Figure rendering: theory lines overlaid on simulation points.

Output is raster PNG at a fixed DPI with minimal, colorblind-safe styling so
repeated renders of the same inputs are byte-identical and CI-diffable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .csvdata import (
    SchemaError,
    SweepTable,
    add_gap_column,
    load_table,
    sim_series,
    theory_series,
)

DPI = 150
FIGURES = ("fig1", "fig2", "fig4", "custom")
# Okabe-Ito palette (colorblind safe)
THEORY_COLOR = "#0072B2"
SIM_COLOR = "#D55E00"


@dataclass(frozen=True)
class FigureSpec:
    """One figure declaration, usually loaded from a TOML file."""

    input_csv: str
    figure: str = "fig1"
    x_axis: str = "tau"
    y_column: str | None = None
    series_by: str | None = None
    log_x: bool = False
    log_y: bool = False
    output: str = "figure.png"
    title: str = ""

    def __post_init__(self) -> None:
        if self.figure not in FIGURES:
            raise SchemaError(f"figure must be one of {FIGURES}, got {self.figure!r}")


_SPEC_KEYS = {
    "input_csv",
    "figure",
    "x_axis",
    "y_column",
    "series_by",
    "log_x",
    "log_y",
    "output",
    "title",
}


def load_figure_spec(path: str | Path) -> FigureSpec:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    if "figure" in doc and isinstance(doc["figure"], dict):
        doc = doc["figure"]
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SchemaError(f"unknown keys in figure spec: {sorted(unknown)}")
    if "input_csv" not in doc:
        raise SchemaError("figure spec must set input_csv")
    return FigureSpec(**doc)


def _figure_defaults(figure: str) -> dict:
    return {
        "fig1": {"y_sim": "e_icl", "y_theory": "e_icl_theory",
                 "label": "ICL error"},
        "fig2": {"y_sim": "e_idg", "y_theory": "e_idg_theory",
                 "label": "IDG error"},
        "fig4": {"y_sim": "g_task", "y_theory": "g_task_theory",
                 "label": "task-diversity gap"},
    }[figure]


def _plot_overlay(ax, table: SweepTable, x_axis, y_sim, y_theory, label):
    line, breaks = theory_series(table, x_axis, y_theory)
    if line.x.size:
        ax.plot(line.x, line.y, "-", color=THEORY_COLOR, label=f"{label} (theory)")
    else:
        warnings.warn(f"no theory rows for {y_theory}; drawing points only")
    for bx in breaks:
        ax.axvline(bx, color="0.6", linestyle=":", linewidth=1.0)
        ax.annotate(
            "divergent",
            (bx, 0.98),
            xycoords=("data", "axes fraction"),
            rotation=90,
            fontsize=7,
            color="0.4",
            ha="right",
            va="top",
        )
    pts = sim_series(table, x_axis, y_sim)
    if pts.x.size:
        ax.errorbar(
            pts.x,
            pts.y,
            yerr=pts.yerr,
            fmt="o",
            color=SIM_COLOR,
            markersize=4,
            capsize=2,
            linestyle="none",
            label=f"{label} (simulation)",
        )
    return line.x.size > 0 or pts.x.size > 0


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the written path."""
    table = load_table(spec.input_csv)
    add_gap_column(table)
    if spec.figure == "custom":
        if not spec.y_column:
            raise SchemaError("custom figures must set y_column")
        y_sim = spec.y_column
        y_theory = f"{spec.y_column}_theory"
        label = spec.y_column
    else:
        defaults = _figure_defaults(spec.figure)
        y_sim, y_theory, label = (
            defaults["y_sim"],
            defaults["y_theory"],
            defaults["label"],
        )
    table.require_columns([spec.x_axis])
    fig, ax = plt.subplots(figsize=(5.0, 3.4), dpi=DPI)
    plotted = _plot_overlay(ax, table, spec.x_axis, y_sim, y_theory, label)
    if not plotted:
        warnings.warn("figure has no plottable series")
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_axis)
    ax.set_ylabel(label)
    if spec.title:
        ax.set_title(spec.title, fontsize=10)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
    return out
