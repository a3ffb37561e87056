"""iclfig: render theory/simulation overlay figures from icllab sweep CSVs."""

from .csvdata import SchemaError, SweepTable, load_table
from .render import DPI, FigureSpec, load_figure_spec, render

__version__ = "0.1.0"

__all__ = [
    "DPI",
    "FigureSpec",
    "SchemaError",
    "SweepTable",
    "load_figure_spec",
    "load_table",
    "render",
]
