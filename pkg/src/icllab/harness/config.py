"""TOML sweep configuration: schema validation and SweepSpec construction.

A sweep file has two tables.  ``[base]`` fixes the scaling parameters and
``[sweep]`` declares which axis to vary and how to run it:

    [base]
    tau = 1.0
    alpha = 1.0
    kappa = 0.5
    rho = 0.01
    lambda = 1e-6        # 0 means ridgeless (theory only)

    [sweep]
    axis = "tau"
    values = [0.25, 0.5, 2.0, 4.0]
    d_list = [50]
    replicates = 10
    eval = "population"  # population | empirical | both
    emit_theory = true
    base_seed = 12345
    task_prior = "gaussian"

Unknown keys anywhere are errors.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass
from pathlib import Path

from ..errors import SchemaError
from ..params import TASK_PRIORS, ScalingParams

SWEEP_AXES = ("tau", "alpha", "kappa", "lambda")
EVAL_CHOICES = ("population", "empirical", "both")

_BASE_KEYS = {"tau", "alpha", "kappa", "rho", "lambda"}
_SWEEP_KEYS = {
    "axis",
    "values",
    "d_list",
    "replicates",
    "eval",
    "emit_theory",
    "base_seed",
    "task_prior",
    "n_test",
}


@dataclass(frozen=True)
class SweepSpec:
    """A validated sweep declaration."""

    axis: str
    values: tuple[float, ...]
    base: ScalingParams
    d_list: tuple[int, ...] = ()
    replicates: int = 1
    eval: str = "population"
    emit_theory: bool = True
    base_seed: int = 0
    task_prior: str = "gaussian"
    n_test: int = 10_000

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise SchemaError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise SchemaError("values must be nonempty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise SchemaError("values must be strictly increasing")
        if self.replicates < 1:
            raise SchemaError(f"replicates must be >= 1, got {self.replicates}")
        if self.eval not in EVAL_CHOICES:
            raise SchemaError(f"eval must be one of {EVAL_CHOICES}, got {self.eval!r}")
        if self.task_prior not in TASK_PRIORS:
            raise SchemaError(
                f"task_prior must be one of {TASK_PRIORS}, got {self.task_prior!r}"
            )
        if any(d < 2 for d in self.d_list):
            raise SchemaError("all entries of d_list must be >= 2")
        if self.n_test < 1:
            raise SchemaError(f"n_test must be >= 1, got {self.n_test}")

    def params_at(self, value: float) -> ScalingParams:
        field_name = "lam" if self.axis == "lambda" else self.axis
        return self.base.with_(**{field_name: value})

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "values": list(self.values),
            "base": {
                "tau": self.base.tau,
                "alpha": self.base.alpha,
                "kappa": self.base.kappa,
                "rho": self.base.rho,
                "lambda": self.base.lam,
            },
            "d_list": list(self.d_list),
            "replicates": self.replicates,
            "eval": self.eval,
            "emit_theory": self.emit_theory,
            "base_seed": self.base_seed,
            "task_prior": self.task_prior,
            "n_test": self.n_test,
        }


def _check_keys(table: dict, allowed: set, where: str) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise SchemaError(f"unknown keys in [{where}]: {sorted(unknown)}")


def spec_from_dict(doc: dict) -> SweepSpec:
    unknown = set(doc) - {"base", "sweep"}
    if unknown:
        raise SchemaError(f"unknown top-level tables: {sorted(unknown)}")
    if "base" not in doc or "sweep" not in doc:
        raise SchemaError("config must contain [base] and [sweep] tables")
    base_tbl, sweep_tbl = doc["base"], doc["sweep"]
    _check_keys(base_tbl, _BASE_KEYS, "base")
    _check_keys(sweep_tbl, _SWEEP_KEYS, "sweep")
    missing = _BASE_KEYS - set(base_tbl)
    if missing:
        raise SchemaError(f"missing keys in [base]: {sorted(missing)}")
    for key in ("axis", "values"):
        if key not in sweep_tbl:
            raise SchemaError(f"missing key in [sweep]: {key}")
    base = ScalingParams(
        tau=float(base_tbl["tau"]),
        alpha=float(base_tbl["alpha"]),
        kappa=float(base_tbl["kappa"]),
        rho=float(base_tbl["rho"]),
        lam=float(base_tbl["lambda"]),
    )
    kwargs = {}
    for key in _SWEEP_KEYS - {"axis", "values", "d_list"}:
        if key in sweep_tbl:
            kwargs[key] = sweep_tbl[key]
    return SweepSpec(
        axis=str(sweep_tbl["axis"]),
        values=tuple(float(v) for v in sweep_tbl["values"]),
        base=base,
        d_list=tuple(int(d) for d in sweep_tbl.get("d_list", ())),
        **kwargs,
    )


def load_spec(path: str | Path) -> SweepSpec:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"invalid TOML in {path}: {exc}") from exc
    return spec_from_dict(doc)
