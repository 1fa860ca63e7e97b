"""Exception types raised by the numerical pipeline."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class ContractError(ValueError):
    """Operation called on an object it does not apply to (e.g. free vs confined)."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature or series did not converge.

    ``best_estimate`` and ``error_estimate`` carry the last available values.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class EvaluationError(RuntimeError):
    """Series evaluation of the radial solution failed."""


class SearchError(RuntimeError):
    """Eigenvalue bracket not found below the energy ceiling."""


class WrongRootError(RuntimeError):
    """A converged eigenfunction has the wrong number of radial nodes."""


class AccuracyError(RuntimeError):
    """A numerical self-check exceeded its tolerance."""


class DivergenceError(ArithmeticError):
    """Requested quantity diverges (e.g. <p^4> of a hard-wall state in momentum space)."""
