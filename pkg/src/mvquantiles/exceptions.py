"""Exception types shared across the package."""


class DegenerateSampleError(ValueError):
    """Sample does not span enough directions for a unique quantile (rank < 2)."""


class SolverConvergenceError(RuntimeError):
    """Quantile solver ran out of iterations.

    Carries the best iterate found so callers can inspect or reuse it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
