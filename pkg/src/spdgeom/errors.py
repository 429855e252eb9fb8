"""Exception types shared across the package."""


class SpdGeomError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpdGeomError, ValueError):
    """Input violates a mathematical precondition (not SPD, degenerate
    configuration, undefined scalar function, malformed subspace, ...)."""


class ConvergenceError(SpdGeomError, RuntimeError):
    """An iterative procedure failed to reach its tolerance.

    Carries the last residual so callers can report how far off it was.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ParseError(SpdGeomError, ValueError):
    """A file or command-line payload could not be parsed."""
