"""Exception hierarchy shared by the library and the CLI."""


class LatChemError(Exception):
    """Base class for all library errors."""


class DomainError(LatChemError, ValueError):
    """Argument outside the mathematical domain of a function."""


class SingularPointError(DomainError):
    """Energy collides with a discrete lattice eigenvalue."""


class RegimeError(LatChemError, ValueError):
    """Parameters outside the regime where an approximation is defined."""


class ConfigError(LatChemError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class CapacityError(LatChemError, MemoryError):
    """Requested basis exceeds the configured memory budget."""

    def __init__(self, message, required=None, limit=None):
        super().__init__(message)
        self.required = required
        self.limit = limit


class ConvergenceError(LatChemError, RuntimeError):
    """Iterative solver stopped before meeting its tolerance."""

    def __init__(self, message, best_residual=None, iterations=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterations = iterations
