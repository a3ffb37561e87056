"""Exception hierarchy shared by every icllab module."""


class IclLabError(Exception):
    """Base class for all icllab errors."""


class DomainError(IclLabError):
    """An input lies outside the mathematical domain of the requested quantity."""


class DivergenceError(IclLabError):
    """The requested quantity diverges at the given parameters (e.g. the
    ridgeless error at the interpolation threshold)."""


class ConvergenceError(IclLabError):
    """An iterative solver failed to bracket or converge."""


class NumericalError(IclLabError):
    """A linear-algebra routine failed (ill conditioning, non-SPD matrix, ...)."""


class IntegrationError(IclLabError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class SchemaError(IclLabError):
    """A config file or CSV does not conform to the documented schema."""
