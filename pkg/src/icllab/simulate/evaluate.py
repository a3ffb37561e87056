"""Exact (population) and Monte Carlo evaluation of a trained attention model,
plus the end-to-end single-instance experiment driver."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..params import FiniteInstance
from .contexts import (
    TaskSet,
    assign_tasks,
    sample_context_block,
    sample_task_set,
)
from .ridge import pretrain_ridge

# Context blocks are capped so the transient (ell+1) x d input array of a
# block stays below ~2^24 floats (128 MiB).
_BLOCK_FLOATS = 2**24

EVAL_MODES = ("icl", "idg")


@dataclass(frozen=True)
class TestMoments:
    """Moments of the test-task distribution needed for exact evaluation.

    r_test : E[w w^T] (d x d);  b_test : E[w].
    s1     : E[||w||^2] / d (equals 1 under either prior as d -> inf).
    t_vec  : E[(||w||^2/d + rho) w]; under the sphere prior this is
             exactly (1+rho) b_test.
    c2     : E[(||w||^2/d + rho)^2]; (1+rho)^2 under the sphere prior,
             (1+rho)^2 + 2/d for fresh gaussian tasks.

    ICL mode: moments of the fresh-task prior (isotropic); IDG mode:
    empirical moments of the pretraining task set.
    """

    r_test: np.ndarray
    b_test: np.ndarray
    s1: float
    t_vec: np.ndarray
    c2: float

    @classmethod
    def icl(cls, d: int, rho: float = 0.0, task_prior: str = "gaussian") -> "TestMoments":
        c2 = (1.0 + rho) ** 2
        if task_prior == "gaussian":
            c2 += 2.0 / d
        return cls(
            r_test=np.eye(d),
            b_test=np.zeros(d),
            s1=1.0,
            t_vec=np.zeros(d),
            c2=c2,
        )

    @classmethod
    def idg(cls, task_set: TaskSet, rho: float = 0.0) -> "TestMoments":
        w = task_set.vectors
        d = task_set.d
        sq = (w**2).sum(axis=1) / d
        return cls(
            r_test=w.T @ w / task_set.k,
            b_test=w.mean(axis=0),
            s1=float(sq.mean()),
            t_vec=(sq + rho) @ w / task_set.k,
            c2=float(((sq + rho) ** 2).mean()),
        )


def population_error(
    gamma: np.ndarray,
    moments: TestMoments,
    ell: int,
    rho: float,
) -> float:
    """Exact expected squared prediction error of Gamma over the test
    distribution, including the 1/ell finite-context corrections:

        e = (1/d) tr(Gamma C Gamma^T) - (2/d) tr(Gamma A^T) + s1 + rho

    where C = E[v v^T] is the second moment of the reduced context features,

        C[:d,:d] = (s1+rho)(d/ell) I + (1+1/ell) R,
        C[:d, d] = (1+2/ell) t,      C[d, d] = (1+2/ell) c2,

    and A = [R, t] the cross moment with the target.  Under the sphere task
    prior (||w||^2 = d exactly) this reduces to the familiar
    (1+rho)/d tr(Gamma B Gamma^T) - (2/d) tr(Gamma A^T) + 1 + rho form."""
    d = gamma.shape[0]
    if gamma.shape != (d, d + 1):
        raise DomainError(f"gamma must be d x (d+1), got {gamma.shape}")
    r, t = moments.r_test, moments.t_vec
    C = np.empty((d + 1, d + 1))
    C[:d, :d] = (moments.s1 + rho) * (d / ell) * np.eye(d) + (
        1.0 + 1.0 / ell
    ) * r
    C[:d, d] = (1.0 + 2.0 / ell) * t
    C[d, :d] = C[:d, d]
    C[d, d] = (1.0 + 2.0 / ell) * moments.c2
    A = np.concatenate([r, t[:, None]], axis=1)
    return float(
        np.einsum("ij,jk,ik->", gamma, C, gamma) / d
        - 2.0 / d * np.einsum("ij,ij->", gamma, A)
        + moments.s1
        + rho
    )


def empirical_error(
    gamma: np.ndarray,
    instance: FiniteInstance,
    mode: str,
    n_test: int,
    rng: np.random.Generator,
    task_set: TaskSet | None = None,
) -> tuple[float, float]:
    """Monte Carlo estimate (mean, standard error) of the squared prediction
    error over n_test fresh test contexts.  ICL mode draws fresh tasks from
    the prior; IDG mode draws tasks uniformly from the pretraining task set."""
    if mode not in EVAL_MODES:
        raise DomainError(f"mode must be one of {EVAL_MODES}, got {mode!r}")
    if n_test < 1:
        raise DomainError(f"n_test must be >= 1, got {n_test}")
    if mode == "idg" and task_set is None:
        raise DomainError("idg mode requires the pretraining task set")
    d, ell = instance.d, instance.ell
    total = 0.0
    total_sq = 0.0
    block = max(1, _BLOCK_FLOATS // ((ell + 1) * d))
    done = 0
    while done < n_test:
        c = min(block, n_test - done)
        if mode == "icl":
            tasks = rng.standard_normal((c, d))
            if instance.task_prior == "sphere":
                tasks *= np.sqrt(d) / np.linalg.norm(tasks, axis=1, keepdims=True)
        else:
            tasks = task_set.vectors[rng.integers(0, task_set.k, size=c)]
        v, xq, y = sample_context_block(tasks, ell, instance.rho, rng)
        preds = np.einsum("nd,de,ne->n", xq, gamma, v)
        sq = (y - preds) ** 2
        total += float(sq.sum())
        total_sq += float((sq * sq).sum())
        done += c
    mean = total / n_test
    var = max(0.0, total_sq / n_test - mean * mean)
    return mean, float(np.sqrt(var / n_test))


@dataclass
class SimRecord:
    """One finite-d experiment outcome."""

    d: int
    n: int
    ell: int
    k: int
    rho: float
    lam: float
    seed: int
    e_icl: float
    e_idg: float
    e_icl_se: float = 0.0
    e_idg_se: float = 0.0
    wall_time_s: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def g_task(self) -> float:
        return self.e_icl - self.e_idg


def run_instance(
    instance: FiniteInstance,
    evaluation: str = "population",
    n_test: int = 10_000,
) -> SimRecord:
    """Full experiment: sample a task set and n pretraining contexts, fit
    Gamma by ridge regression, and evaluate ICL and IDG errors.

    evaluation: 'population' (exact moment formula, default), 'empirical'
    (Monte Carlo with n_test fresh contexts per mode), or 'both'."""
    if evaluation not in ("population", "empirical", "both"):
        raise DomainError(f"unknown evaluation mode {evaluation!r}")
    t0 = time.perf_counter()
    rng = np.random.default_rng(np.random.SeedSequence(instance.seed))
    tasks = sample_task_set(instance, rng)
    idx = assign_tasks(instance.n, instance.k, rng)

    d, n, ell = instance.d, instance.n, instance.ell
    xq = np.empty((n, d))
    v = np.empty((n, d + 1))
    y = np.empty(n)
    block = max(1, _BLOCK_FLOATS // ((ell + 1) * d))
    for s in range(0, n, block):
        e = min(n, s + block)
        v[s:e], xq[s:e], y[s:e] = sample_context_block(
            tasks.vectors[idx[s:e]], ell, instance.rho, rng
        )
    gamma = pretrain_ridge(xq, v, y, instance.lam)
    del xq, v, y

    moments_icl = TestMoments.icl(d, instance.rho, instance.task_prior)
    moments_idg = TestMoments.idg(tasks, instance.rho)
    e_icl_se = e_idg_se = 0.0
    if evaluation in ("population", "both"):
        e_icl = population_error(gamma, moments_icl, ell, instance.rho)
        e_idg = population_error(gamma, moments_idg, ell, instance.rho)
    if evaluation in ("empirical", "both"):
        emp_icl, se_icl = empirical_error(gamma, instance, "icl", n_test, rng)
        emp_idg, se_idg = empirical_error(
            gamma, instance, "idg", n_test, rng, task_set=tasks
        )
        if evaluation == "empirical":
            e_icl, e_idg = emp_icl, emp_idg
            e_icl_se, e_idg_se = se_icl, se_idg

    record = SimRecord(
        d=d,
        n=n,
        ell=ell,
        k=instance.k,
        rho=instance.rho,
        lam=instance.lam,
        seed=instance.seed,
        e_icl=e_icl,
        e_idg=e_idg,
        e_icl_se=e_icl_se,
        e_idg_se=e_idg_se,
        wall_time_s=time.perf_counter() - t0,
    )
    if evaluation == "both":
        record.extra = {
            "e_icl_empirical": emp_icl,
            "e_icl_empirical_se": se_icl,
            "e_idg_empirical": emp_idg,
            "e_idg_empirical_se": se_idg,
        }
    return record
