"""Deterministic asymptotic error curves.

Every formula here is a closed-form (or scalar-root-finding) expression in the
dimensionless load parameters (tau, alpha, kappa, rho, lam):

* finite-ridge ICL and IDG errors via the self-consistent xi equation,
* their ridgeless (lam -> 0+) limits, which diverge at tau = 1,
* the infinite-context limits in both orders of limits,
* the proportional (tau, alpha -> inf, alpha/tau fixed) task-diversity gap,
* the large-kappa 1/kappa tail coefficient of that gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergenceError, DomainError
from .params import ScalingParams
from .rmt import XiSolution, mp_stieltjes, mp_stieltjes_deriv, solve_xi

_TAU_ONE_TOL = 1e-12


@dataclass(frozen=True)
class RidgelessConstants:
    """Scalars entering the ridgeless error formulas.

    q_star  = (1+rho)/alpha
    m_star  = M_kappa(q_star)
    mu_star = q_star * M_{kappa/tau}(q_star)
    xi_star = (1-tau) q_star / (tau mu_star)   (tau < 1 only, else 0)
    p_star  = (1 - kappa (kappa xi_star/(1-tau) + 1)^-2)^-1  (tau < 1 only, else 0)
    """

    q_star: float
    m_star: float
    mu_star: float
    xi_star: float
    p_star: float


@dataclass(frozen=True)
class TheoryPoint:
    """A theory evaluation with its intermediates; g_task = e_icl - e_idg."""

    e_icl: float
    e_idg: float
    intermediates: object = None
    c_e: float = float("nan")

    @property
    def g_task(self) -> float:
        return self.e_icl - self.e_idg


def _check_ridgeless_tau(params: ScalingParams) -> None:
    if abs(params.tau - 1.0) < _TAU_ONE_TOL:
        raise DivergenceError(
            "ridgeless errors diverge at the interpolation threshold tau = 1"
        )


def ridgeless_constants(params: ScalingParams) -> RidgelessConstants:
    q = (1.0 + params.rho) / params.alpha
    m = mp_stieltjes(params.kappa, q)
    mu = q * mp_stieltjes(params.kappa / params.tau, q)
    if params.tau < 1.0:
        xi_star = (1.0 - params.tau) * q / (params.tau * mu)
        p_star = 1.0 / (
            1.0
            - params.kappa
            / (params.kappa * xi_star / (1.0 - params.tau) + 1.0) ** 2
        )
    else:
        xi_star = 0.0
        p_star = 0.0
    return RidgelessConstants(
        q_star=q, m_star=m, mu_star=mu, xi_star=xi_star, p_star=p_star
    )


def icl_error_ridgeless(params: ScalingParams) -> float:
    """ICL generalization error in the ridgeless limit (two branches in tau)."""
    _check_ridgeless_tau(params)
    tau, rho = params.tau, params.rho
    c = ridgeless_constants(params)
    q = c.q_star
    if tau < 1.0:
        mu = c.mu_star
        return (
            (tau * (1.0 + q) / (1.0 - tau))
            * (1.0 - tau * (1.0 - mu) ** 2 + mu * (rho / q - 1.0))
            - 2.0 * tau * (1.0 - mu)
            + 1.0
            + rho
        )
    m = c.m_star
    mp = mp_stieltjes_deriv(params.kappa, q)
    return (
        (q + 1.0)
        * (1.0 - 2.0 * q * m - q * q * mp + (rho + q - q * q * m) * m / (tau - 1.0))
        - 2.0 * (1.0 - q * m)
        + 1.0
        + rho
    )


def idg_error_ridgeless(params: ScalingParams) -> float:
    """IDG generalization error in the ridgeless limit (two branches in tau)."""
    _check_ridgeless_tau(params)
    tau, rho = params.tau, params.rho
    c = ridgeless_constants(params)
    q = c.q_star
    if tau < 1.0:
        xi, mu, p = c.xi_star, c.mu_star, c.p_star
        return (
            tau
            / (1.0 - tau)
            * (
                (rho + q - 2.0 * q * (1.0 - tau) * (q / xi + 1.0))
                / (1.0 - p * (1.0 - tau))
                + tau * mu * (q + xi) ** 2 / q
            )
        )
    return tau / (tau - 1.0) * (rho + q * (1.0 - q * c.m_star))


def _finite_lambda_core(params: ScalingParams):
    """Shared intermediates of the finite-ridge ICL/IDG formulas:
    the xi solution and the variance-amplification constant c_e."""
    sol: XiSolution = solve_xi(params)
    xi, nu = sol.xi, sol.nu
    tau, rho = params.tau, params.rho
    m = mp_stieltjes(params.kappa, nu)
    mp = mp_stieltjes_deriv(params.kappa, nu)
    num = rho + nu - nu * nu * m - xi * (1.0 - 2.0 * nu * m - nu * nu * mp)
    den = 1.0 - 2.0 * xi * m - xi * xi * mp - tau
    c_e = num / den
    return sol, m, mp, c_e


def icl_error(params: ScalingParams) -> TheoryPoint:
    """Finite-ridge ICL error (and the paired IDG value) at lam > 0."""
    if params.lam <= 0:
        raise DomainError("icl_error requires lam > 0; use icl_error_ridgeless")
    sol, m, mp, c_e = _finite_lambda_core(params)
    xi, nu = sol.xi, sol.nu
    q = (1.0 + params.rho) / params.alpha
    e_icl = (
        (q + 1.0)
        * (1.0 - 2.0 * nu * m - nu * nu * mp - c_e * (m + xi * mp))
        - 2.0 * (1.0 - nu * m)
        + 1.0
        + params.rho
    )
    return TheoryPoint(
        e_icl=e_icl, e_idg=-params.tau * c_e, intermediates=sol, c_e=c_e
    )


def idg_error(params: ScalingParams) -> TheoryPoint:
    """Finite-ridge IDG error at lam > 0 (same intermediates as icl_error)."""
    return icl_error(params)


def theory_point(params: ScalingParams) -> TheoryPoint:
    """Evaluate both errors, dispatching on lam: finite-ridge formulas for
    lam > 0, closed-form ridgeless limits for lam == 0."""
    if params.lam > 0:
        return icl_error(params)
    return TheoryPoint(
        e_icl=icl_error_ridgeless(params),
        e_idg=idg_error_ridgeless(params),
        intermediates=ridgeless_constants(params),
    )


def icl_limit_alpha_inf(tau: float, kappa: float, rho: float) -> float:
    """Infinite-context limit taken after the ridgeless limit.

    Returns +inf for kappa <= min(tau, 1); otherwise the closed-form branch
    for tau < 1 or tau > 1."""
    if tau <= 0 or kappa <= 0 or rho < 0:
        raise DomainError(f"invalid (tau, kappa, rho) = ({tau}, {kappa}, {rho})")
    if kappa <= min(tau, 1.0):
        return math.inf
    if tau < 1.0:
        return 1.0 - tau + rho + rho * kappa * tau / ((kappa - tau) * (1.0 - tau))
    return rho + rho * kappa / ((kappa - 1.0) * (tau - 1.0))


def icl_limit_alpha_before_lambda(tau: float, kappa: float, rho: float) -> float:
    """Infinite-context limit taken before the ridgeless limit.

    Finite for kappa <= min(tau, 1), unlike icl_limit_alpha_inf; the other two
    branches coincide with it."""
    if tau <= 0 or kappa <= 0 or rho < 0:
        raise DomainError(f"invalid (tau, kappa, rho) = ({tau}, {kappa}, {rho})")
    if kappa <= min(tau, 1.0):
        return (
            1.0 - kappa + rho + rho * kappa * kappa / ((tau - kappa) * (1.0 - kappa))
        )
    return icl_limit_alpha_inf(tau, kappa, rho)


def gtask_proportional_limit(kappa: float, rho: float, c_star: float) -> float:
    """Task-diversity gap in the proportional limit tau, alpha -> inf with
    c_star = alpha/tau fixed: (1-kappa)(1 + rho c*/(1+rho)) below the kappa=1
    transition, 0 above it."""
    if kappa <= 0 or rho < 0 or c_star <= 0:
        raise DomainError(
            f"invalid (kappa, rho, c_star) = ({kappa}, {rho}, {c_star})"
        )
    if kappa >= 1.0:
        return 0.0
    return (1.0 - kappa) * (1.0 + rho * c_star / (1.0 + rho))


def gtask_large_kappa_coeff(params: ScalingParams) -> float:
    """Leading coefficient of the large-kappa tail: kappa * g_task -> coeff
    as kappa -> inf (the kappa field of params is ignored)."""
    tau, rho = params.tau, params.rho
    if abs(tau - 1.0) < _TAU_ONE_TOL:
        raise DivergenceError("large-kappa coefficient is undefined at tau = 1")
    q = (1.0 + rho) / params.alpha
    if tau < 1.0:
        return (
            2.0
            * tau
            * (
                (-2.0 * q - 0.5) * tau**2
                + (q * q + (3.0 - rho) * q + 1.0 - rho) * tau
                - (1.0 + q) * (q + 0.5 - rho / 2.0)
            )
            / ((tau - 1.0) * (1.0 + q) ** 3)
        )
    return 2.0 * q * q / (1.0 + q) ** 3 + (rho + q - q * q / (q + 1.0)) / (
        (tau - 1.0) * (q + 1.0) ** 2
    )
