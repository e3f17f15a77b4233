"""Exception hierarchy.

The CLI maps each family to an exit code: configuration problems exit 1,
physics/admissibility problems exit 2 and numerical failures exit 3.
"""


class OutflowError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 3


class ConfigError(OutflowError, ValueError):
    exit_code = 1


class PhysicsError(OutflowError, ValueError):
    exit_code = 2


class DomainError(PhysicsError):
    """A thermodynamic state or stencil left the admissible domain v > 0, theta > 0."""


class RegimeError(PhysicsError):
    """A sign condition on the closure (p_rho > 0, e_theta > 0, ...) failed."""


class AdmissibilityError(PhysicsError):
    """Far-field or boundary data for which no (small) stationary solution exists."""


class NumericalError(OutflowError, RuntimeError):
    exit_code = 3


class StepRejected(NumericalError):
    def __init__(self, message, time=None, node=None):
        super().__init__(message)
        self.time = time
        self.node = node


class OutflowViolation(NumericalError):
    def __init__(self, message, time=None, node=0):
        super().__init__(message)
        self.time = time
        self.node = node
