"""icllab: a numerical laboratory for in-context learning by linear attention.

Finite-dimensional Monte Carlo simulation of ridge-pretrained linear attention
on in-context linear regression, exact asymptotic error curves from
random-matrix theory, and Bayes-optimal baseline estimators — with a CLI and
sweep harness that cross-validates simulation against theory.
"""

__version__ = "0.1.0"

from . import errors
from .params import FiniteInstance, ScalingParams

__all__ = ["FiniteInstance", "ScalingParams", "errors", "__version__"]
