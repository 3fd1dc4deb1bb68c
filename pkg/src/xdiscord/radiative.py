"""Two two-level atoms decaying through a shared radiation field.

Atom basis |e> = |0>, |g> = |1>, so the two-atom basis is |ee>, |eg>, |ge>, |gg>.
Time is tau = Gamma t and the collective damping enters through the ratio
gamma = Gamma_12 / Gamma. Starting from |ee> the state stays of the form

    a  0  0  0
    0  b  c  0
    0  c  b  0
    0  0  0  1 - a - 2b

with closed forms for a, b, c; :func:`integrate_master_equation` solves the master
equation numerically as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from .errors import ModelInconsistencyError, ValidationError
from .numerics import ode_rk4
from .states import XState

#: below this |1 -+ gamma| the analytic gamma -> +-1 limit is used
LIMIT_SWITCH = 1e-6
PSD_SLACK = 1e-12

Denominator = Literal["1-gamma^2", "1-gamma"]

_SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
_SM = _SP.conj().T
_SZ = 0.5 * np.diag([1.0, -1.0]).astype(complex)
_I2 = np.eye(2, dtype=complex)
SP = (np.kron(_SP, _I2), np.kron(_I2, _SP))
SM = (np.kron(_SM, _I2), np.kron(_I2, _SM))
SZ = (np.kron(_SZ, _I2), np.kron(_I2, _SZ))


@dataclass(frozen=True)
class AtomPairGeometry:
    k0r: float
    mu_dot_rhat: float = 0.0

    def __post_init__(self):
        if not self.k0r > 0:
            raise ValidationError(f"k0r must be positive, got {self.k0r!r}")
        if not -1.0 <= self.mu_dot_rhat <= 1.0:
            raise ValidationError(f"mu_dot_rhat must lie in [-1, 1], got {self.mu_dot_rhat!r}")

    @property
    def gamma_ratio(self) -> float:
        return coupling_gamma12(self)


@dataclass(frozen=True)
class RadiativeState:
    a: float
    b: float
    c: float
    tau: float
    gamma_ratio: float

    def xstate(self) -> XState:
        return XState(self.a, self.b, self.b, 1.0 - self.a - 2.0 * self.b, 0j, complex(self.c))


def coupling_gamma12(g: AtomPairGeometry) -> float:
    """Collective damping Gamma_12 / Gamma.

    3/2 [(1 - mu^2) sin x / x + (1 - 3 mu^2)(cos x / x^2 - sin x / x^3)], written with
    spherical Bessel functions (cos x / x^2 - sin x / x^3 = -j1(x) / x) so the
    small-separation limit does not cancel catastrophically.
    """
    x, mu2 = g.k0r, g.mu_dot_rhat**2
    j0, j1 = special.spherical_jn(0, x), special.spherical_jn(1, x)
    return float(1.5 * ((1 - mu2) * j0 - (1 - 3 * mu2) * j1 / x))


def coupling_omega12(g: AtomPairGeometry) -> float:
    """Dipole-dipole shift Omega_12 / Gamma.

    3/4 [-(1 - mu^2) cos x / x + (1 - 3 mu^2)(sin x / x^2 + cos x / x^3)].
    """
    x, mu2 = g.k0r, g.mu_dot_rhat**2
    sx, cx = math.sin(x), math.cos(x)
    return 0.75 * (-(1 - mu2) * cx / x + (1 - 3 * mu2) * (sx / x**2 + cx / x**3))


def _expm1_over(x: float, tau: float) -> float:
    """(exp(x tau) - 1) / x, equal to tau at x = 0."""
    if x == 0.0:
        return tau
    return math.expm1(x * tau) / x


def abc(tau: float, gamma_ratio: float,
        denominator: Denominator = "1-gamma^2") -> tuple[float, float, float]:
    """Closed-form a(tau), b(tau), c(tau) for the initial state |ee>.

    b and c are the means and half-differences of the symmetric and antisymmetric
    single-excitation populations, each written with expm1 so there is no
    cancellation as gamma -> +-1. ``denominator="1-gamma"`` reproduces the variant
    with 1/(1 - gamma) in front instead of 1/(1 - gamma^2); it disagrees with the
    master equation and is kept only to demonstrate that.
    """
    if tau < 0:
        raise ValidationError("tau must be non-negative")
    g = float(gamma_ratio)
    if not -1.0 <= g <= 1.0:
        raise ValidationError(f"gamma_ratio must lie in [-1, 1], got {g!r}")
    e2 = math.exp(-2.0 * tau)
    if 1.0 - g < LIMIT_SWITCH:
        b = c = tau * e2
    elif 1.0 + g < LIMIT_SWITCH:
        b, c = tau * e2, -tau * e2
    else:
        # symmetric (|eg> + |ge>)/sqrt2 and antisymmetric populations
        p_s = (1.0 + g) * e2 * _expm1_over(1.0 - g, tau)
        p_a = (1.0 - g) * e2 * _expm1_over(1.0 + g, tau)
        b, c = 0.5 * (p_s + p_a), 0.5 * (p_s - p_a)
    if denominator == "1-gamma":
        b, c = b * (1.0 + g), c * (1.0 + g)
    elif denominator != "1-gamma^2":
        raise ValueError(f"unknown denominator convention {denominator!r}")
    return e2, b, c


def abc_printed(tau: float, gamma_ratio: float,
                denominator: Denominator = "1-gamma^2") -> tuple[float, float, float]:
    """a, b, c written with cosh/sinh exactly as the textbook closed form reads.

    Numerically poor near gamma = +-1; used to confirm :func:`abc` is the same
    function away from that limit.
    """
    g = gamma_ratio
    pref = math.exp(-tau) / ((1.0 - g * g) if denominator == "1-gamma^2" else (1.0 - g))
    ch = math.cosh(g * tau) - math.exp(-tau)
    sh = math.sinh(g * tau)
    b = pref * ((1 + g * g) * ch - 2 * g * sh)
    c = pref * (2 * g * ch - (1 + g * g) * sh)
    return math.exp(-2.0 * tau), b, c


def state(tau: float, gamma_ratio: float, denominator: Denominator = "1-gamma^2") -> RadiativeState:
    a, b, c = abc(tau, gamma_ratio, denominator)
    return RadiativeState(a, b, c, tau, gamma_ratio)


def evolve(tau: float, gamma_ratio: float, denominator: Denominator = "1-gamma^2") -> XState:
    """Two-atom state at tau; raises if the closed form leaves the state space."""
    rs = state(tau, gamma_ratio, denominator)
    rho44 = 1.0 - rs.a - 2.0 * rs.b
    if rs.b < abs(rs.c) - PSD_SLACK or rho44 < -PSD_SLACK or rho44 > 1.0 + PSD_SLACK:
        raise ModelInconsistencyError(
            f"closed form is not a state at tau={tau!r}, gamma={gamma_ratio!r}: "
            f"b={rs.b!r}, c={rs.c!r}, rho44={rho44!r}")
    return rs.xstate()


def master_equation_rhs(rho: np.ndarray, gamma_ratio: float,
                        omega0: float = 0.0, omega12: float = 0.0) -> np.ndarray:
    """d rho / d tau for the collective-decay master equation (rates in units of Gamma)."""
    rho = np.asarray(rho, dtype=complex).reshape(4, 4)
    h = omega0 * (SZ[0] + SZ[1]) + omega12 * (SP[0] @ SM[1] + SP[1] @ SM[0])
    out = -1j * (h @ rho - rho @ h)
    rates = ((1.0, gamma_ratio), (gamma_ratio, 1.0))
    for i in range(2):
        for j in range(2):
            gij = rates[i][j]
            if gij == 0.0:
                continue
            pm = SP[i] @ SM[j]
            out -= 0.5 * gij * (rho @ pm + pm @ rho - 2.0 * SM[j] @ rho @ SP[i])
    return out


def excited_state() -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def integrate_master_equation(gamma_ratio: float, tau_max: float, dt: float = 1e-3, *,
                              rho0: np.ndarray | None = None, omega0: float = 0.0,
                              omega12: float = 0.0, sample_every: int = 1):
    """RK4 solution of the master equation; returns (taus, rhos) with rhos (n, 4, 4)."""
    y0 = excited_state() if rho0 is None else np.asarray(rho0, dtype=complex)

    def deriv(_t, y):
        return master_equation_rhs(y, gamma_ratio, omega0, omega12)

    return ode_rk4(deriv, y0, (0.0, tau_max), dt, sample_every=sample_every)


def discord_radiative(tau: float, gamma_ratio: float) -> float:
    """Trace discord |c(tau)|."""
    return abs(abc(tau, gamma_ratio)[2])


def w_closed(tau: float, gamma_ratio: float) -> tuple[float, float]:
    """(w11 = w22, w33) of the LQU matrix written in tau and gamma.

    w33 = 1 - 2b + 2 sqrt(b^2 - c^2) with
    b^2 - c^2 = exp(-2 tau) (1 + exp(-2 tau) - 2 exp(-tau) cosh(gamma tau)).
    """
    g = gamma_ratio
    if 1.0 - abs(g) < LIMIT_SWITCH:
        a, b, _ = abc(tau, g)
        w11 = math.sqrt(2.0 * b * a) + math.sqrt(max(2.0 * b * (1.0 - a - 2.0 * b), 0.0))
        return w11, 1.0 - 2.0 * b
    em = math.exp(-tau)
    one_m = 1.0 - g * g
    inner = (4 * g * math.sinh(g * tau) + 2 * one_m * math.sinh(tau)
             - 2 * (1 + g * g) * (math.cosh(g * tau) - em))
    # exp(-+g tau) - exp(-tau) without cancellation
    d_minus = -math.exp(-g * tau) * math.expm1(-(1.0 - g) * tau)
    d_plus = -math.exp(g * tau) * math.expm1(-(1.0 + g) * tau)
    w11 = (em / one_m) * (math.sqrt(one_m * em) + math.sqrt(max(inner, 0.0))) * (
        (1 + g) * math.sqrt(max(d_minus, 0.0)) + (1 - g) * math.sqrt(max(d_plus, 0.0)))
    # 1 + e^{-2 tau} - 2 e^{-tau} cosh(g tau) = (1 - e^{-tau})^2 - 4 e^{-tau} sinh^2(g tau / 2)
    disc = em * em * (math.expm1(-tau) ** 2 - 4.0 * em * math.sinh(0.5 * g * tau) ** 2)
    b = abc(tau, g)[1]
    w33 = 1.0 - 2.0 * b + 2.0 * math.sqrt(max(disc, 0.0))
    return w11, w33
