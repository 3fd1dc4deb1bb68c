"""Quantum and classical correlations of two-qubit X states.

Closed-form local quantum uncertainty, trace-distance discord and concurrence,
the pure-dephasing and collective-decay dynamics that keep a state in X form,
brute-force optimizers that check the closed forms, and detectors for freezing,
sudden change and birth/death/revival along a trajectory.
"""

from .errors import (
    InvalidStateError,
    ModelInconsistencyError,
    NotPSDError,
    PreconditionError,
    ShapeError,
    ValidationError,
    XDiscordError,
)
from .measures import MeasureSet, concurrence, lqu, measure_set, trace_discord
from .states import XState, from_bell_diagonal, validate

__all__ = [
    "InvalidStateError",
    "MeasureSet",
    "ModelInconsistencyError",
    "NotPSDError",
    "PreconditionError",
    "ShapeError",
    "ValidationError",
    "XDiscordError",
    "XState",
    "concurrence",
    "from_bell_diagonal",
    "lqu",
    "measure_set",
    "trace_discord",
    "validate",
]

__version__ = "0.1.0"
