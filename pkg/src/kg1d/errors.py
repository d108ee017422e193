"""Exception hierarchy shared by the solver modules."""


class KG1DError(Exception):
    """Base class for all package errors."""


class DomainError(KG1DError, ValueError):
    """An argument lies outside the physical or numerical domain."""


class SolverError(KG1DError, RuntimeError):
    """A numerical search failed to produce an eigen-solution."""


class BracketError(SolverError):
    """Both ends of a search window classify to the same side.

    Raised when no eigenvalue with the requested node count lies in the window.
    """

    def __init__(self, message: str, lo: float, hi: float, context: dict | None = None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
        self.context = dict(context or {})


class IterationLimitError(SolverError):
    pass


class AmbiguousShotError(SolverError):
    """Shot ended without blow-up, with the target node count, but not decayed.

    The integration domain was too short to tell which side of the
    eigenvalue the trial parameter lies on.
    """
