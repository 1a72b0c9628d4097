"""Exception types raised by asymspec."""


class AsymspecError(Exception):
    """Base class for all library errors."""


class DomainError(AsymspecError, ValueError):
    """An argument lies outside the domain of an operation."""


class FormatError(AsymspecError, ValueError):
    """Malformed serialized input (JSON potential or spectral data)."""


class ConvergenceError(AsymspecError, RuntimeError):
    """An iterative procedure failed; ``index`` names the offending item."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InconsistencyError(AsymspecError, RuntimeError):
    """Two routes to the same quantity disagree beyond tolerance."""


class PoleError(AsymspecError, ValueError):
    """Evaluation too close to a Dirichlet eigenvalue."""

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class PreconditionError(AsymspecError, ValueError):
    """The potential violates a standing assumption (fix by pre-shifting)."""
