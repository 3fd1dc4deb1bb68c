"""Local quantum uncertainty, trace-distance discord and concurrence of X states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .states import (
    DEGENERATE_BLOCK,
    SY,
    XState,
    canonicalize,
    from_bell_diagonal,
    sqrt_xstate,
    to_fano_bloch,
    validate,
    x_eigensystem,
)

RADICAND_CLAMP = 1e-12
DEGENERATE_DISCORD = 1e-12
_SYSY = np.kron(SY, SY)


@dataclass(frozen=True)
class WMatrix:
    """W[i, j] = Tr(sqrt(rho) s_i x I sqrt(rho) s_j x I); the (1,3), (2,3) entries vanish."""

    w11: float
    w22: float
    w33: float
    w12: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.w11, self.w12, 0.0],
                         [self.w12, self.w22, 0.0],
                         [0.0, 0.0, self.w33]])

    def eigenvalues(self) -> tuple[float, float, float]:
        """(lambda_+, lambda_-, w33) from the decoupled 2x2 block."""
        mean = 0.5 * (self.w11 + self.w22)
        half = 0.5 * math.hypot(self.w11 - self.w22, 2.0 * self.w12)
        return mean + half, mean - half, self.w33

    def max_eigenvalue(self) -> float:
        return max(self.eigenvalues())


@dataclass(frozen=True)
class MeasureSet:
    lqu: float
    trace_discord: float
    concurrence: float


def w_matrix(x: XState) -> WMatrix:
    """W from the correlation tensor and the square roots of the eigenvalues of rho."""
    es = x_eigensystem(x)
    T = to_fano_bloch(x).T
    s1_sq = es.t1 + 2.0 * math.sqrt(es.d1)
    s2_sq = es.t2 + 2.0 * math.sqrt(es.d2)
    live1 = s1_sq >= DEGENERATE_BLOCK
    live2 = s2_sq >= DEGENERATE_BLOCK
    s1 = math.sqrt(s1_sq) if live1 else 0.0
    s2 = math.sqrt(s2_sq) if live2 else 0.0

    w11 = w22 = w12 = 0.0
    if live1 and live2:
        s12 = s1 * s2
        cross = T[1, 1] ** 2 - T[2, 2] ** 2 + T[1, 2] ** 2 - T[2, 1] ** 2
        local = T[0, 3] ** 2 - T[3, 0] ** 2
        w11 = s12 + 0.25 * (cross + local) / s12
        w22 = s12 + 0.25 * (-cross + local) / s12
        w12 = 0.5 * (T[1, 1] * T[2, 1] + T[2, 2] * T[1, 2]) / s12

    w33 = 0.5 * (s1 * s1 + s2 * s2)
    if live1:
        w33 += 0.125 * ((T[3, 0] + T[0, 3]) ** 2 - (T[1, 1] - T[2, 2]) ** 2
                        - (T[1, 2] + T[2, 1]) ** 2) / s1_sq
    if live2:
        w33 += 0.125 * ((T[0, 3] - T[3, 0]) ** 2 - (T[1, 1] + T[2, 2]) ** 2
                        - (T[1, 2] - T[2, 1]) ** 2) / s2_sq
    return WMatrix(float(w11), float(w22), float(w33), float(w12))


def w_matrix_direct(x: XState) -> np.ndarray:
    """Full 3x3 W evaluated from its trace definition (used as a cross-check)."""
    from .states import PAULI

    root = sqrt_xstate(x)[0].matrix()
    ops = [np.kron(PAULI[i], PAULI[0]) for i in (1, 2, 3)]
    left = [root @ o for o in ops]
    w = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            w[i, j] = np.trace(left[i] @ left[j]).real
    return w


def lqu(x: XState) -> float:
    """LQU = 1 - largest eigenvalue of W, clipped to [0, 1]."""
    u = 1.0 - w_matrix(x).max_eigenvalue()
    return min(1.0, max(0.0, u))


def trace_discord(x: XState) -> float:
    """Trace-distance discord (1/2-normalized) of an arbitrary X state."""
    r = canonicalize(x)
    r11s, r22s, r33s = r.R11 ** 2, r.R22 ** 2, r.R33 ** 2
    rmax = max(r33s, r22s + r.R30 ** 2)
    rmin = min(r11s, r33s)
    num = r11s * rmax - r22s * rmin
    den = rmax - rmin + r11s - r22s
    # The correlators carry absolute rounding of order eps, so den (quadratic) is
    # uncertain at eps * sqrt(scale) and num (quartic) at eps * scale**1.5.
    scale = max(r11s, r22s, rmax)
    if scale == 0.0:
        return 0.0
    root = math.sqrt(scale)
    if abs(num) < DEGENERATE_DISCORD * scale * root and abs(den) < DEGENERATE_DISCORD * root:
        return 0.5 * r.R11
    if num <= 0.0 or den <= 0.0:
        return 0.0
    return 0.5 * math.sqrt(num / den)


def trace_discord_bell_diagonal(c1: float, c2: float, c3: float) -> float:
    """Half the median of |c1|, |c2|, |c3|."""
    from_bell_diagonal(c1, c2, c3)  # physicality check
    return 0.5 * sorted((abs(c1), abs(c2), abs(c3)))[1]


def concurrence_x(x: XState) -> float:
    """Concurrence from the X-state reduction."""
    a = 2.0 * (abs(x.rho14) - math.sqrt(max(x.rho22 * x.rho33, 0.0)))
    b = 2.0 * (abs(x.rho23) - math.sqrt(max(x.rho11 * x.rho44, 0.0)))
    return max(0.0, a, b)


def concurrence_spinflip(rho: np.ndarray, sqrt_rho: np.ndarray | None = None) -> float:
    """Wootters concurrence of a general two-qubit state.

    The square roots of the eigenvalues of rho (sy sy) rho* (sy sy) are the singular
    values of sqrt(rho) (sy sy) sqrt(rho)*, which avoids a non-Hermitian eigensolve.
    """
    if sqrt_rho is None:
        from .numerics import sqrt_psd

        sqrt_rho = sqrt_psd(rho)
    m = sqrt_rho @ _SYSY @ sqrt_rho.conj()
    sv = np.linalg.svd(m, compute_uv=False)
    return max(0.0, float(sv[0] - sv[1] - sv[2] - sv[3]))


def concurrence(x: XState, check: bool = False) -> float:
    c = concurrence_x(x)
    if check:
        root = sqrt_xstate(x)[0].matrix()
        general = concurrence_spinflip(x.matrix(), root)
        assert abs(general - c) < 1e-10, (general, c)
    return c


def measure_set(x: XState) -> MeasureSet:
    x = validate(x)
    return MeasureSet(lqu(x), trace_discord(x), concurrence(x))


def lqu_dephasing_closed_form(c1: float, c2: float, c3: float, gamma_t: float) -> float:
    """LQU of a dephased Bell-diagonal state from the two closed-form branches.

    Requires |c2| <= |c1|. The result only depends on the initial correlators and
    the accumulated dephasing exponent gamma_t.
    """
    if abs(c2) > abs(c1):
        raise PreconditionError("closed form assumes |c1| >= |c2|; use measures.lqu instead")
    from_bell_diagonal(c1, c2, c3)
    e2 = math.exp(-2.0 * gamma_t)
    cp3, cm3 = 1.0 + c3, 1.0 - c3
    cm, cp = c1 - c2, c1 + c2
    rp = math.sqrt(max(cp3 * cp3 - cm * cm * e2, 0.0))
    rm = math.sqrt(max(cm3 * cm3 - cp * cp * e2, 0.0))
    big_p, big_m = cp3 + rp, cm3 + rm
    x = big_p * big_m

    # branch where lambda_max is the largest eigenvalue of the (1,2) block
    if x > DEGENERATE_BLOCK ** 2:
        rx = math.sqrt(x)
        u1 = 0.5 * (2.0 - rx) - cm * cp * e2 / (2.0 * rx)
    else:
        u1 = 1.0
    # branch where lambda_max = w33
    u3 = 0.25 * (2.0 - rp - rm)
    if big_p > DEGENERATE_BLOCK:
        u3 += cm * cm * e2 / (4.0 * big_p)
    if big_m > DEGENERATE_BLOCK:
        u3 += cp * cp * e2 / (4.0 * big_m)
    return min(1.0, max(0.0, min(u1, u3)))
