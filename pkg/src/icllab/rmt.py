"""Scalar random-matrix-theory primitives.

The single building block of every asymptotic error curve is the function

    M_kappa(nu) = 2 / (b + sqrt(b^2 + 4 nu / kappa)),   b = nu + 1 - 1/kappa,

the positive solution of the fixed-point identity

    1/M = 1/(1 + M/kappa) + nu.

This module evaluates M, its derivative in nu, and solves the scalar
self-consistent equation

    xi * M_kappa((1+rho)/alpha + xi) - tau*lam/xi = 1 - tau

for the unique positive root xi by bracketed root-finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .params import ScalingParams

_XI_RESIDUAL_TOL = 1e-10
_MAX_BRACKET_EXPANSIONS = 200


def mp_stieltjes(kappa: float, nu: float) -> float:
    """Evaluate M_kappa(nu).

    Uses the algebraically stable form 2/(b + sqrt(b^2 + 4 nu/kappa)) which
    avoids catastrophic cancellation for large nu.

    Raises DomainError for negative arguments and at the divergent point
    nu = 0 with kappa <= 1.
    """
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if nu < 0:
        raise DomainError(f"nu must be nonnegative, got {nu}")
    if nu == 0 and kappa <= 1:
        raise DomainError(
            f"M_kappa(0) diverges for kappa <= 1 (got kappa={kappa})"
        )
    b = nu + 1.0 - 1.0 / kappa
    return 2.0 / (b + math.sqrt(b * b + 4.0 * nu / kappa))


def mp_stieltjes_deriv(kappa: float, nu: float) -> float:
    """Evaluate M'_kappa(nu) < 0 in closed form:
    M' = -M^2 / (1 - kappa M^2 / (kappa + M)^2)."""
    if nu <= 0:
        raise DomainError(f"nu must be positive for the derivative, got {nu}")
    m = mp_stieltjes(kappa, nu)
    return -m * m / (1.0 - kappa * m * m / (kappa + m) ** 2)


@dataclass(frozen=True)
class XiSolution:
    """Solution of the scalar self-consistent equation.

    xi               : the unique positive root
    nu               : (1+rho)/alpha + xi, the argument fed to M_kappa
    residual         : value of xi*M(nu) - tau*lam/xi - (1-tau) at the root
    quartic_residual : normalized residual of the equivalent quartic
                       polynomial in xi (cross-check only)
    """

    xi: float
    nu: float
    residual: float
    quartic_residual: float


def _quartic_coeffs(tau: float, x: float, kappa: float, lam: float):
    """Coefficients (descending powers of xi) of the quartic obtained by
    clearing denominators in the self-consistent equation, with x = (1+rho)/alpha."""
    t, k, l = tau, kappa, lam
    return (
        k * t,
        -k * l * t + k * t * x + k * t - k * x - t * t - k + t,
        -k * l * t * x - k * l * t + 2 * l * t * t - t * t * x - l * t
        + 2 * t * x - x,
        -l * l * t * t + 2 * l * t * t * x - 2 * l * t * x,
        -l * l * t * t * x,
    )


def _quartic_residual(tau: float, x: float, kappa: float, lam: float, xi: float) -> float:
    coeffs = _quartic_coeffs(tau, x, kappa, lam)
    val = 0.0
    scale = 0.0
    p = 1.0
    for c in reversed(coeffs):
        term = c * p
        val += term
        scale = max(scale, abs(term))
        p *= xi
    return val / scale if scale > 0 else val


def solve_xi(params: ScalingParams) -> XiSolution:
    """Solve xi * M_kappa((1+rho)/alpha + xi) - tau*lam/xi = 1 - tau for xi > 0.

    The left-hand side minus the right-hand side is strictly increasing in xi,
    tends to -infinity as xi -> 0+ and to tau > 0 as xi -> infinity, so a sign
    change always exists; the bracket is found by geometric expansion from 1
    and the root polished with Brent's method.  (The equivalent quartic has a
    double root and is numerically treacherous; it is evaluated only as a
    cross-check, reported in `quartic_residual`.)
    """
    if params.lam <= 0:
        raise DomainError(
            "solve_xi requires lam > 0; ridgeless curves use the closed-form "
            "limits in the theory module"
        )
    tau, lam = params.tau, params.lam
    q = (1.0 + params.rho) / params.alpha
    kappa = params.kappa

    def f(xi: float) -> float:
        return xi * mp_stieltjes(kappa, q + xi) - tau * lam / xi - (1.0 - tau)

    lo = hi = 1.0
    for _ in range(_MAX_BRACKET_EXPANSIONS):
        if f(lo) <= 0:
            break
        lo /= 8.0
    else:
        raise ConvergenceError(
            f"failed to bracket xi from below after "
            f"{_MAX_BRACKET_EXPANSIONS} expansions at {params}"
        )
    for _ in range(_MAX_BRACKET_EXPANSIONS):
        if f(hi) >= 0:
            break
        hi *= 8.0
    else:
        raise ConvergenceError(
            f"failed to bracket xi from above after "
            f"{_MAX_BRACKET_EXPANSIONS} expansions at {params}"
        )

    xi = brentq(f, lo, hi, xtol=1e-30, rtol=1e-15)
    residual = f(xi)
    if abs(residual) > _XI_RESIDUAL_TOL:
        raise ConvergenceError(
            f"xi solver residual {residual:.3e} exceeds {_XI_RESIDUAL_TOL} at {params}"
        )
    return XiSolution(
        xi=xi,
        nu=q + xi,
        residual=residual,
        quartic_residual=_quartic_residual(tau, q, kappa, lam, xi),
    )
