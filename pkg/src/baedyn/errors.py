"""Exception types shared across the package."""


class UnphysicalStateError(ValueError):
    """A covariance matrix violates the uncertainty principle."""


class NumericalError(RuntimeError):
    """An eigensolver or linear solve failed, or NaN appeared in a computation."""


class DivergenceError(RuntimeError):
    """Integration left the physical cone; carries the offending time."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConvergenceError(RuntimeError):
    """Steady-state iteration exhausted its budget; carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
