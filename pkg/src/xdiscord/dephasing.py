"""Two qubits dephasing in independent, identical bosonic reservoirs.

The reservoirs have spectral density J(w) = lam * Omega**(1-s) * w**s * exp(-w/Omega)
at inverse temperature beta. The coherences of the two-qubit state decay as
exp(-gamma(t)) with

    gamma(t) = 2 * int_0^inf J(w) w**-2 coth(beta w / 2) (1 - cos(w t)) dw,

while populations stay fixed. Closed forms for gamma(t) and its time derivative
are provided for every Ohmicity s; :func:`gamma_integral` is the quadrature
ground truth they are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy import special

from .errors import ValidationError
from .numerics import SeriesSum, integrate_semiinfinite, sum_series
from .states import FanoBloch, XState, from_bell_diagonal

#: terms summed explicitly in the thermal series before the integral tail estimate
THERMAL_TERMS = 1 << 16
GAMMA_REL_TOL = 1e-8


@dataclass(frozen=True)
class ReservoirSpec:
    s: float
    lam: float
    Omega: float = 1.0
    beta: float = math.inf

    def __post_init__(self):
        if not self.s > 0:
            raise ValidationError(f"Ohmicity s must be positive, got {self.s!r}")
        if not self.lam >= 0:
            raise ValidationError(f"coupling lam must be non-negative, got {self.lam!r}")
        if not (self.Omega > 0 and math.isfinite(self.Omega)):
            raise ValidationError(f"cutoff Omega must be positive, got {self.Omega!r}")
        if not self.beta > 0:
            raise ValidationError(f"beta must be positive or inf, got {self.beta!r}")

    @property
    def regime(self) -> str:
        if self.s < 1:
            return "sub-ohmic"
        if self.s == 1:
            return "ohmic"
        return "super-ohmic"

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def gamma_limit(self) -> float:
        """lim_{t->inf} gamma(t): finite only for s > 1 at T = 0."""
        if self.lam == 0:
            return 0.0
        if self.s > 1 and self.zero_temperature:
            return 2.0 * self.lam * special.gamma(self.s - 1.0)
        if self.s > 2:
            # the thermal sum of (1 + m Omega beta)**(1-s) converges
            ob = self.Omega * self.beta
            tail = special.zeta(self.s - 1.0, 1.0 + 1.0 / ob) * ob ** (1.0 - self.s)
            return 2.0 * self.lam * special.gamma(self.s - 1.0) * (1.0 + 2.0 * tail)
        return math.inf


@dataclass(frozen=True)
class DephasingScenario:
    c1: float
    c2: float
    c3: float
    reservoir: ReservoirSpec
    v1: float = 1.0
    v2: float = 1.0

    def __post_init__(self):
        from_bell_diagonal(self.c1, self.c2, self.c3)

    def initial_state(self) -> XState:
        return from_bell_diagonal(self.c1, self.c2, self.c3)


def spectral_density(r: ReservoirSpec, w):
    w = np.asarray(w, dtype=float)
    out = r.lam * r.Omega ** (1.0 - r.s) * np.power(w, r.s) * np.exp(-w / r.Omega)
    return float(out) if out.ndim == 0 else out


def _coth_factor(r: ReservoirSpec, w: float) -> float:
    """w * coth(beta w / 2), continuous at w = 0 (value 2 / beta)."""
    if r.zero_temperature:
        return w
    x = 0.5 * r.beta * w
    if x < 1e-8:
        return 2.0 / r.beta
    return w / math.tanh(x)


def gamma_integral(r: ReservoirSpec, t: float, rel_tol: float = GAMMA_REL_TOL) -> float:
    """gamma(t) by adaptive quadrature of its spectral integral."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    if t == 0 or r.lam == 0:
        return 0.0
    pref = r.lam * r.Omega ** (1.0 - r.s) * t * t
    half_t_over_pi = 0.5 * t / math.pi

    # 2 J(w) w^-2 coth(beta w/2) (1 - cos wt) = w^(s-1) * smooth(w)
    def smooth(w):
        sinc = np.sinc(w * half_t_over_pi)
        return pref * math.exp(-w / r.Omega) * sinc * sinc * _coth_factor(r, w)

    def tail_bound(cut):
        k = r.s - 2.0
        if k > 0 and cut <= 2 * k * r.Omega:
            return math.inf
        coth = 1.0 if r.zero_temperature else 1.0 / math.tanh(0.5 * r.beta * cut)
        geo = 1.0 if k <= 0 else 1.0 / (1.0 - k * r.Omega / cut)
        return 4.0 * r.lam * r.Omega ** (1.0 - r.s) * coth * cut**k * r.Omega * math.exp(-cut / r.Omega) * geo

    cutoff = r.Omega * (40.0 + r.s)
    period = 2.0 * math.pi / t
    head = min(period, r.Omega)
    n_pts = int(min(cutoff / period, 400))
    points = [head] + [k * period for k in range(1, n_pts + 1)]
    return integrate_semiinfinite(smooth, rel_tol, cutoff=cutoff, tail_bound=tail_bound,
                                  points=points, singular_exponent=r.s - 1.0)


def _one_minus_re_power(y, s: float):
    """1 - Re[(1 + i y)**(1 - s)] without cancellation at small y."""
    y = np.asarray(y, dtype=float)
    a = 0.5 * (1.0 - s) * np.log1p(y * y)
    b = (1.0 - s) * np.arctan(y)
    return 2.0 * np.sin(0.5 * b) ** 2 - np.expm1(a) * np.cos(b)


def _one_minus_re_power_minus(y, s: float):
    """Same bracket with (1 - y**2) in place of (1 + y**2); NaN where y > 1."""
    y = np.asarray(y, dtype=float)
    with np.errstate(invalid="ignore"):
        return 1.0 - np.power(1.0 - y * y, 0.5 * (1.0 - s)) * np.cos((1.0 - s) * np.arctan(y))


def _thermal_terms(y: float, ob: float) -> int:
    """Explicit terms before the tail: enough that y / (1 + m ob) < 1/4 beyond."""
    return int(min(THERMAL_TERMS, max(64, math.ceil(4.0 * y / ob))))


def _binom(alpha: float, ks: np.ndarray) -> np.ndarray:
    """Generalized binomial coefficients C(alpha, k), also for negative integer alpha."""
    out = np.empty(len(ks))
    for i, k in enumerate(ks):
        c = 1.0
        for j in range(int(k)):
            c *= (alpha - j) / (j + 1)
        out[i] = c
    return out


def _zeta_tail(coef, powers, ob: float, m_last: int) -> float:
    """sum_k coef[k] * sum_{m > m_last} (1 + m ob)**(-powers[k]) via Hurwitz zeta."""
    q = m_last + 1.0 + 1.0 / ob
    total = 0.0
    for c, p in zip(coef, powers):
        total += c * ob ** (-p) * special.zeta(p, q)
    return float(total)


def _gamma_thermal_sum(y: float, s: float, ob: float) -> SeriesSum:
    """sum_{m>=1} a**(1-s) [1 - Re(1 + i y/a)**(1-s)], a = 1 + m ob."""
    kappa = 1.0 - s

    def term(m):
        a = 1.0 + m * ob
        return a**kappa * _one_minus_re_power(y / a, s)

    def tail(m_last):
        # 1 - Re(1+ix)^k = -sum_{j>=1} binom(k, 2j) (-1)^j x^(2j)
        ks = np.arange(1, 9)
        coef = -_binom(kappa, 2 * ks) * (-1.0) ** ks * y ** (2 * ks)
        return _zeta_tail(coef, 2 * ks - kappa, ob, m_last)

    return sum_series(term, rel_tol=1e-16, m_max=_thermal_terms(y, ob), tail=tail)


def _rate_thermal_sum(y: float, s: float, ob: float) -> SeriesSum:
    """sum_{m>=1} (a^2 + y^2)**(-s/2) sin(s arctan(y/a)), a = 1 + m ob."""

    def term(m):
        a = 1.0 + m * ob
        return (a * a + y * y) ** (-0.5 * s) * np.sin(s * np.arctan(y / a))

    def tail(m_last):
        # a^-s * (-Im (1+ix)^-s) = -a^-s sum_j binom(-s, 2j+1) (-1)^j x^(2j+1)
        ks = np.arange(0, 8)
        coef = -_binom(-s, 2 * ks + 1) * (-1.0) ** ks * y ** (2 * ks + 1)
        return _zeta_tail(coef, s + 2 * ks + 1, ob, m_last)

    return sum_series(term, rel_tol=1e-16, m_max=_thermal_terms(y, ob), tail=tail)


def gamma_closed(r: ReservoirSpec, t: float,
                 subohmic_variant: Literal["plus", "minus"] = "plus") -> float:
    """gamma(t) from its closed forms.

    ``subohmic_variant="minus"`` evaluates the alternative reading of the sub-Ohmic
    zero-temperature term with (1 - Omega^2 t^2); it exists only so the quadrature
    check can show it is wrong (it is NaN for Omega t > 1).
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    if t == 0 or r.lam == 0:
        return 0.0
    W, lam, s = r.Omega, r.lam, r.s
    y = W * t
    if s == 1.0:
        val = math.log1p(y * y)
        if not r.zero_temperature:
            z0 = 1.0 + 1.0 / (W * r.beta)
            val += 4.0 * (special.loggamma(z0).real - special.loggamma(z0 + 1j * t / r.beta).real)
        return float(lam * val)

    g = special.gamma(s - 1.0)
    if s < 1 and subohmic_variant == "minus":
        vac = float(_one_minus_re_power_minus(y, s))
    else:
        vac = float(_one_minus_re_power(y, s))
    val = 2.0 * lam * g * vac
    if not r.zero_temperature:
        val += 4.0 * lam * g * _gamma_thermal_sum(y, s, W * r.beta).value
    return float(val)


def gamma_rate(r: ReservoirSpec, t: float) -> float:
    """d gamma / dt from its closed form (valid for every s, including s = 1)."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    if t == 0 or r.lam == 0:
        return 0.0
    W, lam, s = r.Omega, r.lam, r.s
    y = W * t
    gs = special.gamma(s)
    val = 2.0 * lam * gs * W * (1.0 + y * y) ** (-0.5 * s) * math.sin(s * math.atan(y))
    if not r.zero_temperature:
        val += 4.0 * lam * W * gs * _rate_thermal_sum(y, s, W * r.beta).value
    return float(val)


def evolve_gamma(sc: DephasingScenario, t: float, gamma_t: float) -> XState:
    """State at time t given the dephasing exponent gamma_t = gamma(t)."""
    x0 = sc.initial_state()
    damp = math.exp(-gamma_t)
    rho14 = x0.rho14 * np.exp(-1j * (sc.v1 + sc.v2) * t) * damp
    rho23 = x0.rho23 * np.exp(1j * (sc.v2 - sc.v1) * t) * damp
    return replace(x0, rho14=complex(rho14), rho23=complex(rho23))


def evolve(sc: DephasingScenario, t: float) -> XState:
    return evolve_gamma(sc, t, gamma_closed(sc.reservoir, t))


def correlation_tensor(sc: DephasingScenario, t: float, gamma_t: float) -> FanoBloch:
    """Correlation tensor of the evolved state written directly in c_i, v_j, gamma."""
    c1, c2, c3 = sc.c1, sc.c2, sc.c3
    a, b = sc.v1 * t, sc.v2 * t
    ca, sa, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
    damp = math.exp(-gamma_t)
    T = np.zeros((4, 4))
    T[0, 0] = 1.0
    T[1, 1] = (c1 * ca * cb + c2 * sa * sb) * damp
    T[1, 2] = (c1 * ca * sb - c2 * sa * cb) * damp
    T[2, 1] = (c1 * sa * cb - c2 * ca * sb) * damp
    T[2, 2] = (c1 * sa * sb + c2 * ca * cb) * damp
    T[3, 3] = c3
    return FanoBloch(T)


def trace_discord_dephasing_cases(c1: float, c2: float, c3: float,
                                  gamma_t: float) -> tuple[float, str]:
    """Trace discord of the dephased Bell-diagonal state and the active branch.

    Labels: ``"c1"``/``"c2"`` when half the larger (smaller) dephased coherence
    correlator is the median, ``"frozen"`` when |c3| is the median.
    """
    from_bell_diagonal(c1, c2, c3)
    damp = math.exp(-gamma_t)
    k1, k2, k3 = abs(c1) * damp, abs(c2) * damp, abs(c3)
    if k2 > k1:
        big, small, big_label, small_label = k2, k1, "c2", "c1"
    else:
        big, small, big_label, small_label = k1, k2, "c1", "c2"
    if k3 >= big:
        return 0.5 * big, big_label
    if k3 >= small:
        return 0.5 * k3, "frozen"
    return 0.5 * small, small_label

