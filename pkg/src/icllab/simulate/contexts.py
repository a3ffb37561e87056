"""Sampling of task sets and regression contexts, and the rank-one feature map.

A context is ell noisy observations (x_i, y_i = <x_i, w> + eps_i) of a linear
task w, plus a query point x_{ell+1} and its noisy target.  The attention
model's sufficient statistic for a context is the d x (d+1) rank-one feature
matrix

    H = outer(x_query, v),   v = ( (d/ell) sum_i y_i x_i ,  (1/ell) sum_i y_i^2 ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..params import FiniteInstance


@dataclass(frozen=True)
class TaskSet:
    """The k pretraining task vectors, one per row (k x d)."""

    vectors: np.ndarray

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class ContextSample:
    """One context: (ell+1) x d inputs, ell labels, the query target, and the
    index of the generating task (negative for fresh tasks)."""

    xs: np.ndarray
    ys: np.ndarray
    target: float
    task_index: int


def sample_task_set(instance: FiniteInstance, rng: np.random.Generator) -> TaskSet:
    """Draw k task vectors: rows i.i.d. N(0, I_d) under the gaussian prior, or
    uniform on the radius-sqrt(d) sphere under the sphere prior."""
    w = rng.standard_normal((instance.k, instance.d))
    if instance.task_prior == "sphere":
        w *= np.sqrt(instance.d) / np.linalg.norm(w, axis=1, keepdims=True)
    return TaskSet(vectors=w)


def sample_context(
    task: np.ndarray,
    instance: FiniteInstance,
    rng: np.random.Generator,
    task_index: int = -1,
) -> ContextSample:
    """Draw one context for the given task vector: inputs i.i.d. N(0, I_d/d),
    labels y_i = <x_i, w> + eps_i with eps_i i.i.d. N(0, rho); the query target
    includes its own noise draw."""
    d, ell = instance.d, instance.ell
    xs = rng.standard_normal((ell + 1, d)) / np.sqrt(d)
    noise = rng.standard_normal(ell + 1) * np.sqrt(instance.rho)
    labels = xs @ task + noise
    return ContextSample(
        xs=xs, ys=labels[:ell], target=float(labels[ell]), task_index=task_index
    )


def assign_tasks(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Map each of n contexts to a task index: exactly n/k contexts per task
    when k divides n (in random order), else i.i.d. uniform assignment."""
    if n % k == 0:
        return rng.permutation(np.repeat(np.arange(k), n // k))
    return rng.integers(0, k, size=n)


def sample_context_block(
    tasks: np.ndarray,
    ell: int,
    rho: float,
    rng: np.random.Generator,
):
    """Vectorized draw of one context per row of ``tasks`` (c x d).

    Returns (v, xq, y): the length-(d+1) reduced feature vectors, the query
    inputs, and the noisy query targets.  The full (ell+1) x d input arrays are
    reduced immediately so a block never occupies more than c*(ell+1)*d floats.
    """
    c, d = tasks.shape
    xs = rng.standard_normal((c, ell + 1, d)) / np.sqrt(d)
    noise = rng.standard_normal((c, ell + 1)) * np.sqrt(rho)
    labels = np.einsum("nld,nd->nl", xs, tasks) + noise
    v = np.empty((c, d + 1))
    v[:, :d] = (d / ell) * np.einsum("nl,nld->nd", labels[:, :ell], xs[:, :ell])
    v[:, d] = np.einsum("nl,nl->n", labels[:, :ell], labels[:, :ell]) / ell
    return v, np.ascontiguousarray(xs[:, ell]), np.ascontiguousarray(labels[:, ell])


def reduced_features(context: ContextSample, ell: int) -> np.ndarray:
    """The length-(d+1) vector v such that H = outer(x_query, v)."""
    d = context.xs.shape[1]
    if context.ys.shape[0] != ell:
        raise DomainError(
            f"context has {context.ys.shape[0]} labels, expected ell={ell}"
        )
    v = np.empty(d + 1)
    v[:d] = (d / ell) * (context.ys @ context.xs[:ell])
    v[d] = float(context.ys @ context.ys) / ell
    return v


def build_features(context: ContextSample, d: int, ell: int) -> np.ndarray:
    """The d x (d+1) rank-one feature matrix H of a context."""
    if context.xs.shape[1] != d:
        raise DomainError(f"context dimension {context.xs.shape[1]} != d={d}")
    return np.outer(context.xs[ell], reduced_features(context, ell))
