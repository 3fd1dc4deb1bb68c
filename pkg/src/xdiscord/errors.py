"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class XDiscordError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(XDiscordError, ValueError):
    """Input matrix or parameter fails a structural check (shape, Hermiticity)."""


class NotPSDError(ValidationError):
    """Matrix has an eigenvalue below the PSD clamp threshold."""


class InvalidStateError(ValidationError):
    """A density-matrix invariant is violated.

    ``invariant`` names the failed check so callers (and the CLI) can report it.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class ShapeError(ValidationError):
    """A Fano-Bloch tensor carries entries outside the X-state pattern."""


class PreconditionError(XDiscordError, ValueError):
    """A closed-form shortcut was called outside its domain of validity."""


class ModelInconsistencyError(XDiscordError):
    """A model produced an unphysical state (signals a wrong closed form)."""


class QuadratureError(XDiscordError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class IntegrationError(XDiscordError, ArithmeticError):
    """ODE integration produced a non-finite state."""

    def __init__(self, message: str, last_time: float):
        super().__init__(f"{message} (last valid t={last_time!r})")
        self.last_time = last_time
