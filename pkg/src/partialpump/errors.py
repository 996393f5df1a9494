"""Exception types raised by the solvers."""


class NullSpaceDegenerate(RuntimeError):
    """More than one steady state: the generator has a degenerate null space."""


class NoConvergence(RuntimeError):
    """An iterative solver did not reach its tolerance."""


class InvalidSteadyState(RuntimeError):
    """Solved state violates positivity, Hermiticity or the residual bound."""


class DefectiveNearEP(RuntimeError):
    """Eigenvector matrix too ill-conditioned for the residue expansion."""

    def __init__(self, condition: float):
        super().__init__(f"eigenvector condition number {condition:.3g} exceeds limit")
        self.condition = condition


class GridError(ValueError):
    """Frequency grid cannot resolve the requested feature."""
