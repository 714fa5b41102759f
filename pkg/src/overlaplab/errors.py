"""Exception taxonomy shared across the toolkit.

Domain errors (subclasses of :class:`DomainError`) describe well-defined
mathematical failure modes; the CLI maps them to exit code 2.  Anything
else (bad arguments, unreadable files) is a usage error.
"""

from __future__ import annotations


class DomainError(Exception):
    """A computation failed for a legitimate dynamical reason."""


class NoConvergence(DomainError):
    """Newton iteration stagnated before reaching the residual target."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class NotHyperbolic(DomainError):
    """The located fixed point has no eigenvalue off the unit circle."""


class NoSuchConnection(DomainError):
    """Requested separatrix connection does not exist at this epsilon."""


class InsufficientArclength(DomainError):
    """Manifold arcs are too short to reach the measurement section."""


class TailTruncationError(DomainError):
    """Separatrix tails are not yet in the quadrature noise floor."""


class StepLimitExceeded(DomainError):
    """Integrator ran out of its step budget.

    Carries whatever part of the trajectory was computed so the caller
    can inspect how far the run got.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
