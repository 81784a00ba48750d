"""Exception types shared across wellkit."""


class WellkitError(Exception):
    """Base class for all wellkit errors."""


class NonGenericError(WellkitError, ValueError):
    """Input data is degenerate with respect to the target point.

    Raised when a vertex value coincides with the target, or (in 2-D) an edge
    image passes through it.  ``offenders`` holds the vertex indices involved.
    """

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = tuple(int(i) for i in offenders)


class SizeLimitError(WellkitError, ValueError):
    """An exact oracle was asked to handle more points than it allows."""


class BoundaryContactError(WellkitError):
    """Local degree requested for a component that reaches the domain boundary."""


class ConsistencyError(WellkitError, RuntimeError):
    """Internal algebraic invariant violated while assembling a module."""
