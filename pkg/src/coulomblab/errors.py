"""Exception types shared across the lab."""


class CoulombLabError(Exception):
    """Base class for all lab errors."""


class InvalidPointError(CoulombLabError, ValueError):
    """A point with non-finite coordinates was passed to an evaluator."""


class DomainError(CoulombLabError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ConfigurationError(CoulombLabError, ValueError):
    """A run configuration is inconsistent (grid too small, bad bracket, ...)."""


class IterationLimitError(CoulombLabError, RuntimeError):
    """An iterative solver hit its iteration cap before converging."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IncompatibilityError(CoulombLabError, ValueError):
    """A boundary-value problem has incompatible data (nonzero component flux)."""

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class DegenerateFieldError(CoulombLabError, ValueError):
    """A field has no usable nodes left after exclusions."""


class NumericError(CoulombLabError, RuntimeError):
    """A numerical routine failed (eigensolver non-convergence, ...)."""
