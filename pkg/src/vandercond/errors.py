class VandercondError(Exception):
    pass


class PreconditionError(VandercondError, ValueError):
    """Arguments violate a documented precondition."""


class DomainError(PreconditionError):
    """Arithmetic domain violation (division by zero, sqrt of a negative, ...)."""


class ClassificationError(PreconditionError):
    """A node set admits no unambiguous nearly-colliding pairing."""


class SolverError(VandercondError, RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message: str, residual: float | None = None, sweeps: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.sweeps = sweeps
