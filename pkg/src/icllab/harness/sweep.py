"""Sweep execution and persistent result logs.

Every run produces a CSV with a fixed header plus a JSON sidecar capturing the
full configuration.  Rows come in two kinds, distinguished by the ``mode``
column: ``theory`` rows carry only the deterministic curve values, simulation
rows carry one finite-d replicate each (with theory columns repeated for
convenient overlay plotting).  Per-row failures are recorded in the trailing
``error`` column and never abort the sweep.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import DivergenceError, IclLabError
from ..params import FiniteInstance, ScalingParams
from ..simulate import run_instance
from ..theory import theory_point
from .config import SweepSpec

CSV_COLUMNS = (
    "d",
    "tau",
    "alpha",
    "kappa",
    "rho",
    "lambda",
    "seed",
    "replicate",
    "mode",
    "e_icl",
    "e_icl_se",
    "e_idg",
    "e_idg_se",
    "g_task",
    "e_icl_theory",
    "e_idg_theory",
    "wall_time_s",
    "error",
)


def format_value(x) -> str:
    """Serialize a cell: floats at 17 significant digits (round-trip exact)."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(format_value(row.get(c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_output(
    rows: list[dict],
    out_path: str | Path,
    config: dict,
    extra_meta: dict | None = None,
) -> Path:
    """Write the CSV and its JSON sidecar; honors the ICLLAB_OUT_DIR override."""
    out_path = Path(out_path)
    override = os.environ.get("ICLLAB_OUT_DIR")
    if override:
        out_path = Path(override) / out_path.name
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(rows_to_csv(rows))
    sidecar = {
        "tool": "icllab",
        "version": __version__,
        "config": config,
        "columns": list(CSV_COLUMNS),
    }
    if extra_meta:
        sidecar.update(extra_meta)
    out_path.with_suffix(out_path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )
    return out_path


def _base_cells(params: ScalingParams) -> dict:
    return {
        "tau": params.tau,
        "alpha": params.alpha,
        "kappa": params.kappa,
        "rho": params.rho,
        "lambda": params.lam,
    }


def _theory_cells(params: ScalingParams) -> dict:
    """Theory values for one grid point, with divergence flagged not NaN."""
    try:
        point = theory_point(params)
        return {"e_icl_theory": point.e_icl, "e_idg_theory": point.e_idg}
    except DivergenceError:
        return {"error": "divergent"}
    except IclLabError as exc:
        return {"error": f"theory_error:{type(exc).__name__}"}


def theory_curve(spec: SweepSpec) -> list[dict]:
    """Pure-theory rows over the sweep grid (no simulation)."""
    rows = []
    for value in spec.values:
        params = spec.params_at(value)
        row = {**_base_cells(params), "mode": "theory"}
        row.update(_theory_cells(params))
        rows.append(row)
    return rows


def replicate_seed(base_seed: int, grid_idx: int, d_idx: int, rep: int) -> int:
    """Deterministic per-job seed, independent of execution order and
    parallelism degree."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(grid_idx, d_idx, rep))
    return int(ss.generate_state(1, np.uint64)[0])


def _run_job(args) -> list[dict]:
    (params, d, seed, rep, task_prior, evaluation, n_test, theory_cells) = args
    base = {
        **_base_cells(params),
        "d": d,
        "seed": seed,
        "replicate": rep,
        **theory_cells,
    }
    try:
        instance = FiniteInstance.from_scaling(
            params, d=d, seed=seed, task_prior=task_prior
        )
        record = run_instance(instance, evaluation=evaluation, n_test=n_test)
    except IclLabError as exc:
        return [{**base, "mode": evaluation, "error": f"{type(exc).__name__}:{exc}"}]
    rows = []
    modes = ["population", "empirical"] if evaluation == "both" else [evaluation]
    for mode in modes:
        if mode == "population" or evaluation != "both":
            e_icl, e_idg = record.e_icl, record.e_idg
            se_icl, se_idg = record.e_icl_se, record.e_idg_se
        else:
            e_icl = record.extra["e_icl_empirical"]
            se_icl = record.extra["e_icl_empirical_se"]
            e_idg = record.extra["e_idg_empirical"]
            se_idg = record.extra["e_idg_empirical_se"]
        rows.append(
            {
                **base,
                "mode": mode,
                "e_icl": e_icl,
                "e_icl_se": se_icl,
                "e_idg": e_idg,
                "e_idg_se": se_idg,
                "g_task": e_icl - e_idg,
                "wall_time_s": record.wall_time_s,
            }
        )
    return rows


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[dict]:
    """Execute the sweep: theory rows first (when emit_theory), then one row
    per (grid value, d, replicate) in deterministic order regardless of the
    parallelism degree."""
    rows: list[dict] = []
    theory_by_grid = {}
    for gi, value in enumerate(spec.values):
        params = spec.params_at(value)
        cells = _theory_cells(params) if spec.emit_theory else {}
        theory_by_grid[gi] = cells
        if spec.emit_theory:
            row = {**_base_cells(params), "mode": "theory"}
            row.update(cells)
            rows.append(row)

    jobs = []
    for gi, value in enumerate(spec.values):
        params = spec.params_at(value)
        for di, d in enumerate(spec.d_list):
            for rep in range(spec.replicates):
                seed = replicate_seed(spec.base_seed, gi, di, rep)
                theory_cells = {
                    k: v
                    for k, v in theory_by_grid[gi].items()
                    if k != "error"
                }
                jobs.append(
                    (
                        params,
                        d,
                        seed,
                        rep,
                        spec.task_prior,
                        spec.eval,
                        spec.n_test,
                        theory_cells,
                    )
                )

    if threads is None:
        threads = os.cpu_count() or 1
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]
    for job_rows in results:
        rows.extend(job_rows)
    return rows
