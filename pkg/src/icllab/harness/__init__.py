"""Configuration, CLI, parameter sweeps, and persistent result logs."""

from .config import SweepSpec, load_spec, spec_from_dict
from .sweep import (
    CSV_COLUMNS,
    replicate_seed,
    rows_to_csv,
    run_sweep,
    theory_curve,
    write_output,
)

__all__ = [
    "CSV_COLUMNS",
    "SweepSpec",
    "load_spec",
    "replicate_seed",
    "rows_to_csv",
    "run_sweep",
    "spec_from_dict",
    "theory_curve",
    "write_output",
]
