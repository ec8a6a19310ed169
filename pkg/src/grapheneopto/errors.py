"""Exception and warning types shared across the package."""


class GrapheneOptoError(Exception):
    """Base class for all package errors."""


class DomainError(GrapheneOptoError, ValueError):
    """An input lies outside the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation at (or too close to) a mathematical singularity."""


class ConvergenceError(GrapheneOptoError, RuntimeError):
    """An iterative procedure did not converge."""


class WeakCouplingError(GrapheneOptoError):
    """The analytic weak-coupling results do not apply to this parameter set.

    Raised when ``|G|`` or ``|G_e|`` exceeds the configured fraction of the
    total cavity decay rate.
    """


class InstabilityError(GrapheneOptoError):
    """The effective mechanical damping is not positive; no steady state exists."""


class ConfigError(GrapheneOptoError, ValueError):
    """Invalid run configuration."""


class ValidityWarning(UserWarning):
    """A result was computed outside the regime where its derivation holds."""
