"""Bayes-optimal within-context estimators: the ridge (Gaussian-prior) posterior
mean and the discrete-prior posterior mean (dMMSE), with analytic error
formulas and extreme-value asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import betainc, betaln, gammaln

from .errors import DomainError, IntegrationError
from .params import FiniteInstance
from .rmt import mp_stieltjes
from .simulate.contexts import ContextSample, TaskSet
from .simulate.kernels import residual_energies


# ---------------------------------------------------------------------------
# Ridge (Gaussian-prior) Bayes estimator
# ---------------------------------------------------------------------------

def ridge_bayes_predict(context: ContextSample, rho: float) -> float:
    """Posterior-mean prediction under a Gaussian task prior:
    x_query^T (sum x x^T + rho I)^{-1} (sum y x)."""
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    ell = context.ys.shape[0]
    xs = context.xs[:ell]
    d = xs.shape[1]
    G = xs.T @ xs
    G[np.diag_indices(d)] += rho
    w = np.linalg.solve(G, xs.T @ context.ys)
    return float(context.xs[ell] @ w)


def ridge_bayes_error_theory(alpha: float, rho: float) -> float:
    """Asymptotic error of the ridge Bayes estimator (identical for ICL and
    IDG test distributions): rho (1 + M_alpha(rho/alpha) / alpha)."""
    if alpha <= 0 or rho <= 0:
        raise DomainError(f"alpha and rho must be positive, got ({alpha}, {rho})")
    return rho * (1.0 + mp_stieltjes(alpha, rho / alpha) / alpha)


def ridge_bayes_error_mc(
    d: int,
    ell: int,
    rho: float,
    n_mc: int,
    rng: np.random.Generator,
    mode: str = "icl",
    task_set: TaskSet | None = None,
    block: int = 256,
) -> tuple[float, float]:
    """Monte Carlo (mean, standard error) of the ridge Bayes estimator's
    squared prediction error over n_mc fresh contexts."""
    if mode not in ("icl", "idg"):
        raise DomainError(f"mode must be 'icl' or 'idg', got {mode!r}")
    if mode == "idg" and task_set is None:
        raise DomainError("idg mode requires a task set")
    total = total_sq = 0.0
    done = 0
    while done < n_mc:
        c = min(block, n_mc - done)
        if mode == "icl":
            tasks = rng.standard_normal((c, d))
        else:
            tasks = task_set.vectors[rng.integers(0, task_set.k, size=c)]
        xs = rng.standard_normal((c, ell + 1, d)) / np.sqrt(d)
        noise = rng.standard_normal((c, ell + 1)) * np.sqrt(rho)
        labels = np.einsum("nld,nd->nl", xs, tasks) + noise
        G = np.einsum("nli,nlj->nij", xs[:, :ell], xs[:, :ell])
        G[:, np.arange(d), np.arange(d)] += rho
        rhs = np.einsum("nl,nld->nd", labels[:, :ell], xs[:, :ell])
        w = np.linalg.solve(G, rhs[..., None])[..., 0]
        preds = np.einsum("nd,nd->n", xs[:, ell], w)
        sq = (labels[:, ell] - preds) ** 2
        total += float(sq.sum())
        total_sq += float((sq * sq).sum())
        done += c
    mean = total / n_mc
    var = max(0.0, total_sq / n_mc - mean * mean)
    return mean, float(np.sqrt(var / n_mc))


# ---------------------------------------------------------------------------
# dMMSE (discrete-prior) Bayes estimator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DmmseConfig:
    """Configuration of the discrete-prior posterior-mean estimator."""

    task_set: TaskSet
    rho: float
    n_mc: int = 1000

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if self.n_mc < 1:
            raise DomainError(f"n_mc must be >= 1, got {self.n_mc}")


def dmmse_weights(xs: np.ndarray, ys: np.ndarray, config: DmmseConfig) -> np.ndarray:
    """Posterior weights over the task set: softmax of -||ys - xs w_j||^2/(2 rho),
    normalized in the log domain (max subtraction) to avoid underflow."""
    energies = residual_energies(
        np.ascontiguousarray(xs), np.ascontiguousarray(ys), config.task_set.vectors
    )
    logw = -energies / (2.0 * config.rho)
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def dmmse_predict(context: ContextSample, config: DmmseConfig) -> float:
    """Posterior-mean prediction under the discrete task prior."""
    ell = context.ys.shape[0]
    weights = dmmse_weights(context.xs[:ell], context.ys, config)
    w_bayes = weights @ config.task_set.vectors
    return float(context.xs[ell] @ w_bayes)


def _dmmse_error_mc(
    config: DmmseConfig,
    instance: FiniteInstance,
    mode: str,
    rng: np.random.Generator,
) -> tuple[float, float]:
    d, ell = instance.d, instance.ell
    sq = np.empty(config.n_mc)
    for i in range(config.n_mc):
        if mode == "icl":
            task = rng.standard_normal(d)
            if instance.task_prior == "sphere":
                task *= np.sqrt(d) / np.linalg.norm(task)
        else:
            task = config.task_set.vectors[rng.integers(0, config.task_set.k)]
        xs = rng.standard_normal((ell + 1, d)) / np.sqrt(d)
        noise = rng.standard_normal(ell + 1) * np.sqrt(instance.rho)
        labels = xs @ task + noise
        weights = dmmse_weights(xs[:ell], labels[:ell], config)
        w_bayes = weights @ config.task_set.vectors
        sq[i] = (labels[ell] - xs[ell] @ w_bayes) ** 2
    return float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(config.n_mc))


def dmmse_gtask_mc(
    config: DmmseConfig,
    instance: FiniteInstance,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo estimate (mean, standard error) of the dMMSE estimator's
    task-diversity gap e_icl - e_idg."""
    e_icl, se_icl = _dmmse_error_mc(config, instance, "icl", rng)
    e_idg, se_idg = _dmmse_error_mc(config, instance, "idg", rng)
    return e_icl - e_idg, float(np.hypot(se_icl, se_idg))


# ---------------------------------------------------------------------------
# Infinite-context dMMSE gap: Beta order-statistic formulas
# ---------------------------------------------------------------------------

def dmmse_gtask_alpha_inf(d: int, k: int) -> float:
    """Infinite-context dMMSE gap g = 4 (1 - E[max of k i.i.d. Beta(D, D)])
    with D = (d-1)/2, by adaptive quadrature of the order-statistic density."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    D = (d - 1) / 2.0
    log_norm = -betaln(D, D)

    def integrand(m: float) -> float:
        if m <= 0.0 or m >= 1.0:
            return 0.0
        logpdf = log_norm + (D - 1.0) * (math.log(m) + math.log1p(-m))
        cdf = betainc(D, D, m)
        if cdf <= 0.0:
            return 0.0
        return m * math.exp(math.log(k) + logpdf + (k - 1.0) * math.log(cdf))

    val, err = quad(integrand, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=400)
    if err > 1e-8:
        raise IntegrationError(
            f"order-statistic quadrature error {err:.3e} exceeds 1e-8 "
            f"at (d={d}, k={k})"
        )
    return 4.0 * (1.0 - val)


def dmmse_gtask_alpha_inf_asymptotic(d: int, k: int) -> float:
    """Closed-form large-k asymptotic of the infinite-context gap:
    4 B(D)^{1/D} Gamma(1 + 1/D) k^{-1/D}, B(D) = Gamma(D)^2 / Gamma(2D)."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    D = (d - 1) / 2.0
    log_B = 2.0 * gammaln(D) - gammaln(2.0 * D)
    return 4.0 * math.exp(log_B / D + gammaln(1.0 + 1.0 / D)) * k ** (-1.0 / D)
