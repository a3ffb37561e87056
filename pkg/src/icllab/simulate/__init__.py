"""Finite-dimensional Monte Carlo simulation of ridge-pretrained linear
attention on in-context linear regression."""

from .contexts import (
    ContextSample,
    TaskSet,
    assign_tasks,
    build_features,
    reduced_features,
    sample_context,
    sample_context_block,
    sample_task_set,
)
from .evaluate import (
    SimRecord,
    TestMoments,
    empirical_error,
    population_error,
    run_instance,
)
from .ridge import pretrain_ridge, ridge_objective

__all__ = [
    "ContextSample",
    "TaskSet",
    "SimRecord",
    "TestMoments",
    "assign_tasks",
    "build_features",
    "empirical_error",
    "population_error",
    "pretrain_ridge",
    "reduced_features",
    "ridge_objective",
    "run_instance",
    "sample_context",
    "sample_context_block",
    "sample_task_set",
]
