"""Command-line entry point.

Subcommands:
  theory     pure theory curves over a sweep grid (millisecond scale)
  simulate   one finite-d instance
  sweep      full sweep from a TOML config (theory rows + replicates)
  baselines  ridge-Bayes and dMMSE estimator evaluation
  selftest   fast invariant suite; exit 0 iff all pass

On failure the process exits nonzero with a machine-readable JSON object on
stderr.  The environment variable ICLLAB_OUT_DIR overrides the directory of
any ``--out`` path.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .. import __version__
from ..errors import IclLabError
from ..params import FiniteInstance, ScalingParams
from .config import EVAL_CHOICES, load_spec
from .sweep import (
    CSV_COLUMNS,
    _base_cells,
    _theory_cells,
    replicate_seed,
    rows_to_csv,
    run_sweep,
    theory_curve,
    write_output,
)


def _emit(rows, args, config: dict) -> None:
    if args.out:
        path = write_output(rows, args.out, config)
        print(f"wrote {path}")
    else:
        sys.stdout.write(rows_to_csv(rows))


def _scaling_from_args(args) -> ScalingParams:
    return ScalingParams(
        tau=args.tau, alpha=args.alpha, kappa=args.kappa, rho=args.rho, lam=args.lam
    )


def _cmd_theory(args) -> int:
    spec = load_spec(args.config)
    rows = theory_curve(spec)
    _emit(rows, args, spec.to_dict())
    return 0


def _cmd_simulate(args) -> int:
    from ..simulate import run_instance

    params = _scaling_from_args(args)
    instance = FiniteInstance.from_scaling(
        params, d=args.d, seed=args.seed, task_prior=args.task_prior
    )
    record = run_instance(instance, evaluation=args.eval, n_test=args.n_test)
    row = {
        **_base_cells(params),
        "d": args.d,
        "seed": args.seed,
        "replicate": 0,
        "mode": args.eval,
        "e_icl": record.e_icl,
        "e_icl_se": record.e_icl_se,
        "e_idg": record.e_idg,
        "e_idg_se": record.e_idg_se,
        "g_task": record.g_task,
        "wall_time_s": record.wall_time_s,
    }
    row.update(_theory_cells(params))
    _emit([row], args, {"command": "simulate", "params": _base_cells(params)})
    return 0


def _cmd_sweep(args) -> int:
    spec = load_spec(args.config)
    if args.seed is not None:
        spec = dataclasses.replace(spec, base_seed=args.seed)
    if args.eval is not None:
        spec = dataclasses.replace(spec, eval=args.eval)
    rows = run_sweep(spec, threads=args.threads)
    _emit(rows, args, spec.to_dict())
    return 0


def _cmd_baselines(args) -> int:
    from ..baselines import (
        DmmseConfig,
        dmmse_gtask_mc,
        ridge_bayes_error_mc,
        ridge_bayes_error_theory,
    )
    from ..simulate import sample_task_set

    rows = []
    kappas = [float(v) for v in args.kappa_grid.split(",")] if args.kappa_grid else [
        args.kappa
    ]
    for kappa in kappas:
        params = ScalingParams(
            tau=1.0, alpha=args.alpha, kappa=kappa, rho=args.rho, lam=1.0
        )
        base = {**_base_cells(params), "lambda": None, "tau": None, "d": args.d,
                "seed": args.seed, "replicate": 0}
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        ell = max(1, round(args.alpha * args.d))
        k = max(1, round(kappa * args.d))
        instance = FiniteInstance(
            d=args.d, n=1, ell=ell, k=k, rho=args.rho, lam=1.0, seed=args.seed
        )
        if args.which == "ridge":
            tasks = sample_task_set(instance, rng)
            e_icl, se_icl = ridge_bayes_error_mc(
                args.d, ell, args.rho, args.n_mc, rng, mode="icl"
            )
            e_idg, se_idg = ridge_bayes_error_mc(
                args.d, ell, args.rho, args.n_mc, rng, mode="idg", task_set=tasks
            )
            theory = ridge_bayes_error_theory(args.alpha, args.rho)
            rows.append(
                {
                    **base,
                    "mode": "baseline_ridge",
                    "e_icl": e_icl,
                    "e_icl_se": se_icl,
                    "e_idg": e_idg,
                    "e_idg_se": se_idg,
                    "g_task": e_icl - e_idg,
                    "e_icl_theory": theory,
                    "e_idg_theory": theory,
                }
            )
        else:
            tasks = sample_task_set(instance, rng)
            config = DmmseConfig(task_set=tasks, rho=args.rho, n_mc=args.n_mc)
            gap, se = dmmse_gtask_mc(config, instance, rng)
            rows.append(
                {
                    **base,
                    "mode": "baseline_dmmse",
                    "g_task": gap,
                    "e_icl_se": se,
                }
            )
    _emit(rows, args, {"command": "baselines", "which": args.which})
    return 0


def _cmd_selftest(args) -> int:
    """Fast invariant checks; prints one line per check."""
    from ..rmt import mp_stieltjes, mp_stieltjes_deriv, solve_xi
    from ..simulate import pretrain_ridge
    from ..theory import icl_error, icl_error_ridgeless

    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    worst = 0.0
    for kappa in (0.2, 0.5, 1.0, 2.0, 5.0, 100.0):
        for nu in (0.01, 0.1, 1.0, 10.0):
            m = mp_stieltjes(kappa, nu)
            worst = max(worst, abs(1 / m - 1 / (1 + m / kappa) - nu) * m)
    check("stieltjes fixed-point identity < 1e-12", worst < 1e-12)

    m0 = mp_stieltjes(2.0, 1.0)
    h = 1e-6
    fd = (mp_stieltjes(2.0, 1.0 + h) - mp_stieltjes(2.0, 1.0 - h)) / (2 * h)
    cf = mp_stieltjes_deriv(2.0, 1.0)
    check("derivative matches finite difference", abs(cf - fd) / abs(fd) < 1e-6)
    check("stieltjes positive", m0 > 0)

    sol = solve_xi(ScalingParams(tau=2.0, alpha=1.0, kappa=1.0, rho=0.0, lam=1e-6))
    check("xi solver residual < 1e-10", abs(sol.residual) < 1e-10)
    check("xi small-ridge scaling", abs(sol.xi - 2e-6) / sol.xi < 1e-3)

    p = ScalingParams(tau=0.5, alpha=1.0, kappa=0.5, rho=0.01, lam=1e-8)
    rel = abs(icl_error(p).e_icl - icl_error_ridgeless(p)) / icl_error_ridgeless(p)
    check("ridgeless consistency < 1e-4", rel < 1e-4)

    rng = np.random.default_rng(0)
    d, n = 5, 100
    xq = rng.standard_normal((n, d))
    v = rng.standard_normal((n, d + 1))
    y = rng.standard_normal(n)
    g1 = pretrain_ridge(xq, v, y, 0.1, method="primal")
    g2 = pretrain_ridge(xq, v, y, 0.1, method="dual")
    rel = np.linalg.norm(g1 - g2) / np.linalg.norm(g1)
    check("primal/dual equivalence < 1e-8", rel < 1e-8)

    print(f"{'OK' if failures == 0 else 'FAILED'}: {failures} failure(s)")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icllab",
        description="Numerical laboratory for in-context learning by linear attention",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=False):
        p.add_argument("--config", required=config_required, help="TOML sweep config")
        p.add_argument("--out", help="output CSV path (stdout if omitted)")
        p.add_argument("--seed", type=int, default=None, help="base seed override")
        p.add_argument("--threads", type=int, default=None, help="worker processes")
        p.add_argument("--eval", choices=EVAL_CHOICES, default=None)

    p = sub.add_parser("theory", help="pure theory curves over a sweep grid")
    add_common(p, config_required=True)
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("simulate", help="run one finite-d instance")
    add_common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--task-prior", choices=("gaussian", "sphere"), default="gaussian")
    p.add_argument("--n-test", type=int, default=10_000)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run a sweep from a TOML config")
    add_common(p, config_required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("baselines", help="evaluate baseline estimators")
    add_common(p)
    p.add_argument("--which", choices=("ridge", "dmmse"), required=True)
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.01)
    p.add_argument("--n-mc", type=int, default=10_000)
    p.add_argument("--kappa-grid", default=None, help="comma-separated kappa values")
    p.set_defaults(func=_cmd_baselines)

    p = sub.add_parser("selftest", help="run the fast invariant suite")
    add_common(p)
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and args.command in (
        "simulate",
        "baselines",
    ):
        args.seed = 0
    if getattr(args, "eval", None) is None and args.command == "simulate":
        args.eval = "population"
    try:
        return args.func(args)
    except IclLabError as exc:
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 2
    except OSError as exc:
        json.dump({"error": "OSError", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
