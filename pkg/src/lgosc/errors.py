"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical or dimensionless parameter is outside its domain."""


class ConvergenceError(RuntimeError):
    """An adaptive computation ran out of its subdivision budget.

    Carries the best estimate obtained so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SingularIntervalError(ValueError):
    """The evolution interval hits a propagator singularity (sin of the
    phase separation below guard).  Callers should use the exact
    parity/identity map for half-period multiples instead."""


class CapabilityError(RuntimeError):
    """The requested operation is not supported by this engine
    (e.g. unsharp measurements on the closed-form engine)."""


class ConfigurationError(ValueError):
    """A grid or run configuration cannot represent the requested state."""


class BranchUnreachableError(RuntimeError):
    """A measurement branch carries (numerically) zero probability."""
