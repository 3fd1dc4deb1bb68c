from __future__ import annotations

import math
import os

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from xdiscord.states import XState

settings.register_profile("default", deadline=None, max_examples=60)
settings.register_profile("stress", deadline=None, max_examples=3000)
settings.load_profile(os.environ.get("XDISCORD_HYPOTHESIS_PROFILE", "default"))


@st.composite
def xstates(draw, pure_fraction: bool = False):
    """X states from four weights, two coherence magnitudes and two phases."""
    w = [draw(st.floats(0.0, 1.0)) for _ in range(4)]
    if sum(w) < 1e-6:
        w = [1.0, 1.0, 1.0, 1.0]
    p = np.array(w) / sum(w)
    f14, f23 = draw(st.floats(0.0, 1.0)), draw(st.floats(0.0, 1.0))
    ph14, ph23 = draw(st.floats(0.0, 2 * math.pi)), draw(st.floats(0.0, 2 * math.pi))
    r14 = f14 * math.sqrt(p[0] * p[3])
    r23 = f23 * math.sqrt(p[1] * p[2])
    return XState(*map(float, p), complex(r14 * np.exp(1j * ph14)), complex(r23 * np.exp(1j * ph23)))


@st.composite
def bell_triples(draw):
    """(c1, c2, c3) inside the Bell-diagonal tetrahedron."""
    c = np.array([draw(st.floats(-1.0, 1.0)) for _ in range(3)])
    lam = 0.25 * np.array([1 + c[0] - c[1] + c[2], 1 - c[0] + c[1] + c[2],
                           1 + c[0] + c[1] - c[2], 1 - c[0] - c[1] - c[2]])
    if lam.min() < 0:
        # pull the point toward the origin until it is inside
        k = min(0.25 / (0.25 - lam.min()), 1.0) * 0.999
        c = c * k
    return tuple(float(v) for v in c)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
