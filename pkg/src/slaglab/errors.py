"""Exception hierarchy shared across the lab."""


class SlagLabError(Exception):
    """Base class for all lab errors."""


class DomainError(SlagLabError, ValueError):
    """An argument lies outside the domain of an operator."""


class PreconditionError(SlagLabError, ValueError):
    """An operation's documented precondition does not hold."""


class NotSpacelikeError(PreconditionError):
    """The induced metric on a plane (or at a grid node) is not positive definite.

    Attributes
    ----------
    min_eigenvalue : float
        Smallest eigenvalue of the offending Gram matrix.
    location : tuple or None
        Grid coordinates of the offending node, when known.
    """

    def __init__(self, message, min_eigenvalue=None, location=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.location = location


class BranchCrossingError(SlagLabError, ArithmeticError):
    """An arctan identity was evaluated across a pole; ``shift`` is the
    multiple of pi that restores the principal-branch identity."""

    def __init__(self, message, shift=0.0):
        super().__init__(message)
        self.shift = shift


class ConvergenceError(SlagLabError, RuntimeError):
    """Newton iteration exhausted its budget."""

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = history or []


class LeftAdmissibleRegionError(ConvergenceError):
    """No damped step keeps every nodal Hessian admissible
    (convex for Monge-Ampere, space-like for the family)."""


class ConsistencyError(SlagLabError, RuntimeError):
    """Internal numerical consistency check failed."""
