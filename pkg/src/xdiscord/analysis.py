"""Feature detection on sampled measure trajectories.

The detectors are deliberately simple threshold rules:

* freezing: maximal runs where the value stays within ``eps_flat`` of the run mean;
* sudden change: kinks where the discrete slope jumps by more than ``threshold``
  times its local median absolute deviation;
* birth / death / revival: crossings of the level ``eps_zero``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import dephasing, measures, radiative
from .errors import PreconditionError

EPS_ZERO = 1e-4
EPS_FLAT_REL = 1e-6
KINK_THRESHOLD = 10.0
MEASURES = ("lqu", "d_t", "conc")


@dataclass(frozen=True)
class Event:
    kind: str  # freeze_start, freeze_end, sudden_change, birth, death, revival
    time: float
    measure: str
    value: float

    def as_dict(self) -> dict:
        return {"kind": self.kind, "time": self.time, "measure": self.measure, "value": self.value}


@dataclass
class TimeTrace:
    times: np.ndarray
    lqu: np.ndarray
    d_t: np.ndarray
    conc: np.ndarray
    features: list[Event] = field(default_factory=list)
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        n = len(self.times)
        for name in MEASURES:
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
            setattr(self, name, arr)
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def series(self, measure: str) -> np.ndarray:
        return getattr(self, measure)


def sort_events(events: Iterable[Event]) -> list[Event]:
    order = {"freeze_start": 0, "birth": 0, "revival": 0, "sudden_change": 1, "death": 2, "freeze_end": 2}
    return sorted(events, key=lambda e: (e.time, order.get(e.kind, 1)))


# --- freezing ---------------------------------------------------------------------

def detect_freezing(times: Sequence[float], values: Sequence[float], eps_flat: float | None = None,
                    measure: str = "d_t", min_samples: int = 3,
                    rel_flat: float = EPS_FLAT_REL) -> list[Event]:
    """Maximal runs where every sample lies within ``eps_flat`` of the run mean.

    Runs must also stay above ``eps_flat`` (a vanishing measure is not "frozen"),
    and the spread must be below ``rel_flat`` times the run mean as well, so slowly
    decaying tails far below the trace maximum do not count as plateaus.
    ``eps_flat`` defaults to 1e-6 times the largest |value|.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n == 0:
        return []
    if eps_flat is None:
        eps_flat = EPS_FLAT_REL * float(np.max(np.abs(v)))
    if eps_flat <= 0:
        return []

    events: list[Event] = []
    i = 0
    while i < n:
        if not v[i] > eps_flat:
            i += 1
            continue
        lo = hi = total = v[i]
        j = i
        while j + 1 < n and v[j + 1] > eps_flat:
            nlo, nhi, ntot = min(lo, v[j + 1]), max(hi, v[j + 1]), total + v[j + 1]
            mean = ntot / (j + 2 - i)
            tol = min(eps_flat, rel_flat * abs(mean))
            if nhi - mean >= tol or mean - nlo >= tol:
                break
            lo, hi, total = nlo, nhi, ntot
            j += 1
        if j - i + 1 >= min_samples:
            mean = total / (j - i + 1)
            events.append(Event("freeze_start", float(t[i]), measure, float(mean)))
            events.append(Event("freeze_end", float(t[j]), measure, float(mean)))
            i = j + 1
        else:
            i += 1
    return events


# --- kinks ------------------------------------------------------------------------

def detect_sudden_change(times: Sequence[float], values: Sequence[float], window: int = 5,
                         measure: str = "d_t", threshold: float = KINK_THRESHOLD) -> list[Event]:
    """Kinks: samples where the slope jump stands out from its neighbourhood.

    With slopes s_k on each grid interval, the jump at interior sample i is
    s_i - s_{i-1}. It is scored against the median and median absolute deviation
    of the jumps within ``window`` samples on either side (the sample itself
    excluded); the deviation is floored at 1e-6 of the largest |slope| so that
    rounding noise on flat stretches never scores. One event is reported per
    cluster of consecutive high scores, at the intersection of the straight lines
    through the neighbouring intervals.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    n = len(v)
    if n < 2 * window + 1 or n < 4:
        return []
    slope = np.diff(v) / np.diff(t)
    jump = np.diff(slope)  # jump[k] sits at sample k + 1
    floor = max(1e-6 * float(np.max(np.abs(slope))), 1e-12 * float(np.max(np.abs(v))) / float(np.min(np.diff(t))), 1e-300)
    m = len(jump)
    score = np.zeros(m)
    for k in range(m):
        lo, hi = max(0, k - window), min(m, k + window + 1)
        neigh = np.concatenate([jump[lo:k], jump[k + 1:hi]])
        med = float(np.median(neigh))
        mad = float(np.median(np.abs(neigh - med)))
        score[k] = abs(jump[k] - med) / max(mad, floor)

    events: list[Event] = []
    hot = score > threshold
    k = 0
    while k < m:
        if not hot[k]:
            k += 1
            continue
        start = k
        while k + 1 < m and hot[k + 1]:
            k += 1
        best = start + int(np.argmax(score[start:k + 1]))
        i = best + 1  # sample index
        events.append(Event("sudden_change", _kink_time(t, v, slope, i), measure, float(v[i])))
        k += 1
    return events


def _kink_time(t, v, slope, i) -> float:
    """Intersection of the lines through the intervals left and right of sample i."""
    if i - 2 < 0 or i + 1 >= len(slope):
        return float(t[i])
    s_left, s_right = slope[i - 2], slope[i + 1]
    if s_left == s_right:
        return float(t[i])
    # left line through (t[i-1], v[i-1]); right line through (t[i+1], v[i+1])
    tk = (v[i + 1] - v[i - 1] + s_left * t[i - 1] - s_right * t[i + 1]) / (s_left - s_right)
    return float(min(max(tk, t[i - 1]), t[i + 1]))


# --- birth / death / revival ------------------------------------------------------

def detect_birth_death_revival(times: Sequence[float], values: Sequence[float],
                               eps_zero: float = EPS_ZERO, measure: str = "conc") -> list[Event]:
    """Level crossings of ``eps_zero``: birth, then death / revival alternating.

    Crossing times are linearly interpolated between samples.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return []
    if v[0] >= eps_zero:
        raise PreconditionError(f"{measure} starts at {v[0]!r}, not below eps_zero={eps_zero!r}")
    events: list[Event] = []
    above = False
    born = False
    for i in range(1, len(v)):
        now = v[i] >= eps_zero
        if now == above:
            continue
        frac = (eps_zero - v[i - 1]) / (v[i] - v[i - 1])
        tc = float(t[i - 1] + frac * (t[i] - t[i - 1]))
        if now:
            events.append(Event("revival" if born else "birth", tc, measure, float(eps_zero)))
            born = True
        else:
            events.append(Event("death", tc, measure, float(eps_zero)))
        above = now
    return events


def first_time(events: Iterable[Event], kind: str, measure: str | None = None) -> float | None:
    for e in events:
        if e.kind == kind and (measure is None or e.measure == measure):
            return e.time
    return None


# --- branch crossing for the dephasing model --------------------------------------

def crossing_time(c1: float, c3: float, r: dephasing.ReservoirSpec, *,
                  tol: float = 1e-13, max_doublings: int = 200) -> float | None:
    """Time t* with gamma(t*) = ln(|c1| / |c3|), or None if it never happens."""
    a1, a3 = abs(c1), abs(c3)
    if a3 == 0.0 or a1 <= a3:
        return None
    target = math.log(a1 / a3)
    if r.gamma_limit() <= target:
        return None

    def resid(t):
        return dephasing.gamma_closed(r, t) - target

    lo, hi = 0.0, 1.0 / r.Omega
    for _ in range(max_doublings):
        if resid(hi) >= 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        return None
    while hi - lo > tol * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if resid(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# --- trace builders ---------------------------------------------------------------

def dephasing_trace(sc: dephasing.DephasingScenario, times: Sequence[float]) -> TimeTrace:
    times = np.asarray(times, dtype=float)
    gam = np.array([dephasing.gamma_closed(sc.reservoir, float(t)) for t in times])
    lq, dt, cc = [], [], []
    for t, g in zip(times, gam):
        x = dephasing.evolve_gamma(sc, float(t), float(g))
        lq.append(measures.lqu(x))
        dt.append(measures.trace_discord(x))
        cc.append(measures.concurrence(x))
    return TimeTrace(times, np.array(lq), np.array(dt), np.array(cc), extra={"gamma_t": gam})


def radiative_trace(taus: Sequence[float], gamma_ratio: float) -> TimeTrace:
    taus = np.asarray(taus, dtype=float)
    cols = {k: [] for k in ("a", "b", "c")}
    lq, dt, cc = [], [], []
    for tau in taus:
        rs = radiative.state(float(tau), gamma_ratio)
        x = radiative.evolve(float(tau), gamma_ratio)
        cols["a"].append(rs.a)
        cols["b"].append(rs.b)
        cols["c"].append(rs.c)
        lq.append(measures.lqu(x))
        dt.append(measures.trace_discord(x))
        cc.append(measures.concurrence(x))
    return TimeTrace(taus, np.array(lq), np.array(dt), np.array(cc),
                     extra={k: np.array(v) for k, v in cols.items()})


def dephasing_features(trace: TimeTrace, eps_flat: float | None = None, window: int = 5) -> list[Event]:
    events: list[Event] = []
    for name in ("lqu", "d_t"):
        vals = trace.series(name)
        events += detect_freezing(trace.times, vals, eps_flat, measure=name)
        events += detect_sudden_change(trace.times, vals, window, measure=name)
    return sort_events(events)


def radiative_features(trace: TimeTrace, eps_zero: float = EPS_ZERO) -> list[Event]:
    events: list[Event] = []
    for name in MEASURES:
        events += detect_birth_death_revival(trace.times, trace.series(name), eps_zero, measure=name)
    return sort_events(events)
