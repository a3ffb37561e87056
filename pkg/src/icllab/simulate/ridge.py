"""Closed-form ridge pretraining of the attention parameter matrix.

Gamma minimizes  (d/2n) sum_mu (y_mu - <Gamma, H_mu>)^2 + (lam/2) ||Gamma||_F^2
over d x (d+1) matrices, where H_mu = outer(xq_mu, v_mu) is rank one.  With
phi_mu = vec(H_mu) and effective regularizer (n/d) lam, the solution is

    vec(Gamma) = ((n/d) lam I + sum phi phi^T)^{-1} sum y phi        (primal)
              =  sum_mu a_mu phi_mu,  a = (K + (n/d) lam I)^{-1} y   (dual)

with kernel K = (Xq Xq^T) o (V V^T) (Hadamard product).  The primal solve is a
D x D SPD system with D = d(d+1); the dual is n x n.  The cheaper one is
chosen automatically; both agree to high precision.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..errors import DomainError, NumericalError
from .kernels import accumulate_gram

# Feature blocks are capped so a block never exceeds ~2^27 floats (1 GiB).
_BLOCK_FLOATS = 2**27


def _spd_solve(A: np.ndarray, b: np.ndarray, what: str) -> np.ndarray:
    try:
        return cho_solve(cho_factor(A, lower=False, check_finite=False), b,
                         check_finite=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise NumericalError(f"{what} Cholesky solve failed: {exc}") from exc


def pretrain_ridge(
    xq: np.ndarray,
    v: np.ndarray,
    y: np.ndarray,
    lam: float,
    method: str = "auto",
) -> np.ndarray:
    """Solve the ridge problem for Gamma given the reduced context data.

    xq : n x d query inputs; v : n x (d+1) reduced features; y : n targets.
    method: 'auto' picks primal when D = d(d+1) <= n, else dual.
    Returns the d x (d+1) matrix Gamma.
    """
    if lam <= 0:
        raise DomainError(f"pretrain_ridge requires lam > 0, got {lam}")
    n, d = xq.shape
    if v.shape != (n, d + 1) or y.shape != (n,):
        raise DomainError(
            f"inconsistent shapes: xq {xq.shape}, v {v.shape}, y {y.shape}"
        )
    D = d * (d + 1)
    lam_eff = (n / d) * lam
    if method == "auto":
        method = "primal" if D <= n else "dual"
    if method == "primal":
        A = np.zeros((D, D))
        b = np.zeros(D)
        block = max(1, _BLOCK_FLOATS // D)
        for s in range(0, n, block):
            e = min(n, s + block)
            accumulate_gram(
                A, b,
                np.ascontiguousarray(xq[s:e]),
                np.ascontiguousarray(v[s:e]),
                np.ascontiguousarray(y[s:e]),
            )
        A[np.diag_indices_from(A)] += lam_eff
        return _spd_solve(A, b, "primal").reshape(d, d + 1)
    if method == "dual":
        K = (xq @ xq.T) * (v @ v.T)
        K[np.diag_indices_from(K)] += lam_eff
        a = _spd_solve(K, y, "dual")
        return xq.T @ (a[:, None] * v)
    raise DomainError(f"unknown method {method!r}")


def ridge_objective(
    gamma: np.ndarray,
    xq: np.ndarray,
    v: np.ndarray,
    y: np.ndarray,
    lam: float,
) -> float:
    """The pretraining objective value at a given Gamma (for optimality tests)."""
    n, d = xq.shape
    preds = np.einsum("nd,de,ne->n", xq, gamma, v)
    return float(
        (d / (2.0 * n)) * np.sum((y - preds) ** 2)
        + 0.5 * lam * np.sum(gamma * gamma)
    )
