"""Parameter containers: dimensionless scaling knobs and concrete finite-d
experiment configurations."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DomainError

TASK_PRIORS = ("gaussian", "sphere")


@dataclass(frozen=True)
class ScalingParams:
    """The dimensionless knobs indexing every theory curve.

    tau   = n / d^2   (pretraining sample load)
    alpha = ell / d   (context-length load)
    kappa = k / d     (task-diversity load)
    rho   : label-noise variance
    lam   : ridge strength (0 means ridgeless)
    """

    tau: float
    alpha: float
    kappa: float
    rho: float
    lam: float = 0.0

    def __post_init__(self) -> None:
        if not (self.tau > 0 and self.alpha > 0 and self.kappa > 0):
            raise DomainError(
                f"tau, alpha, kappa must be positive, got "
                f"({self.tau}, {self.alpha}, {self.kappa})"
            )
        if self.rho < 0:
            raise DomainError(f"rho must be nonnegative, got {self.rho}")
        if self.lam < 0:
            raise DomainError(f"lam must be nonnegative, got {self.lam}")

    def with_(self, **kwargs) -> "ScalingParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class FiniteInstance:
    """A concrete finite-dimensional experiment configuration."""

    d: int
    n: int
    ell: int
    k: int
    rho: float
    lam: float
    seed: int = 0
    task_prior: str = "gaussian"

    def __post_init__(self) -> None:
        if self.d < 2:
            raise DomainError(f"d must be >= 2, got {self.d}")
        if min(self.n, self.ell, self.k) < 1:
            raise DomainError(
                f"n, ell, k must be positive, got ({self.n}, {self.ell}, {self.k})"
            )
        if self.rho < 0:
            raise DomainError(f"rho must be nonnegative, got {self.rho}")
        if self.lam <= 0:
            raise DomainError(
                f"lam must be positive for finite-d training, got {self.lam}"
            )
        if self.task_prior not in TASK_PRIORS:
            raise DomainError(
                f"task_prior must be one of {TASK_PRIORS}, got {self.task_prior!r}"
            )

    @classmethod
    def from_scaling(
        cls,
        params: ScalingParams,
        d: int,
        seed: int = 0,
        task_prior: str = "gaussian",
    ) -> "FiniteInstance":
        """Realize scaling parameters at token dimension d:
        n = round(tau d^2), ell = round(alpha d), k = round(kappa d)."""
        return cls(
            d=d,
            n=max(1, round(params.tau * d * d)),
            ell=max(1, round(params.alpha * d)),
            k=max(1, round(params.kappa * d)),
            rho=params.rho,
            lam=params.lam,
            seed=seed,
            task_prior=task_prior,
        )

    def scaling(self) -> ScalingParams:
        """The dimensionless parameters this instance realizes."""
        return ScalingParams(
            tau=self.n / self.d**2,
            alpha=self.ell / self.d,
            kappa=self.k / self.d,
            rho=self.rho,
            lam=self.lam,
        )
