"""Small numeric kernels used throughout the package.

Everything here is pure and stateless: Hermitian eigensolvers for 2-4 dimensional
matrices, PSD square roots, trace norms, quadrature on [0, inf), classical RK4 and
convergent series summation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import IntegrationError, NotPSDError, QuadratureError, ValidationError

#: Eigenvalues in [-PSD_CLAMP, 0) are treated as rounding noise and clamped to zero.
PSD_CLAMP = 1e-10
#: Max |m - m^dagger| entry accepted as Hermitian.
HERMITIAN_TOL = 1e-12

SERIES_REL_TOL = 1e-12
SERIES_M_MAX = 10**6


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SeriesSum:
    value: float
    converged: bool
    n_terms: int
    tail_used: bool = False


def as_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as a complex array after checking shape and Hermiticity."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3, 4):
        raise ValidationError(f"expected a square matrix of dimension 2, 3 or 4, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T))
    if not dev <= tol:
        raise ValidationError(f"matrix is not Hermitian (max deviation {dev:.3e} > {tol:.0e})")
    return 0.5 * (a + a.conj().T)


def eig_hermitian(m) -> EigenDecomposition:
    """Eigendecomposition of a small Hermitian matrix, eigenvalues ascending."""
    a = as_hermitian(m)
    w, v = np.linalg.eigh(a)
    return EigenDecomposition(w, v)


def sqrt_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues down to ``-PSD_CLAMP`` are clamped to zero; anything more negative
    raises :class:`NotPSDError`.
    """
    dec = eig_hermitian(m)
    w = dec.eigenvalues
    if w[0] < -PSD_CLAMP:
        raise NotPSDError(f"matrix is not PSD (smallest eigenvalue {w[0]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    v = dec.eigenvectors
    out = (v * root) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(as_hermitian(m)))))


def integrate_semiinfinite(
    f: Callable[[float], float],
    rel_tol: float = 1e-10,
    *,
    cutoff: float | None = None,
    tail_bound: Callable[[float], float] | None = None,
    points: Sequence[float] | None = None,
    abs_tol: float = 0.0,
    limit: int = 2000,
    singular_exponent: float = 0.0,
) -> float:
    """Integrate ``f`` over [0, inf).

    With ``cutoff`` the adaptive Gauss-Kronrod rule runs on [0, cutoff] and
    ``tail_bound(cutoff)`` must bound the discarded tail; the cutoff is doubled until
    the bound is below the tolerance. Without a cutoff the infinite range is mapped
    onto a finite one. ``f`` must be finite on (0, inf); an integrable singularity at
    0 is fine as long as ``f`` is never evaluated exactly there.

    Raises :class:`QuadratureError` (carrying the best estimate) if the error
    estimate stays above ``max(rel_tol * |I|, abs_tol)``.

    A non-zero ``singular_exponent`` a means the integrand is ``w**a * f(w)`` with
    ``f`` regular at 0; the first panel (up to the first breakpoint) then uses an
    algebraic-weight rule so that an integrable ``w**a`` singularity costs nothing.
    """
    if abs_tol <= 0 and rel_tol < 50 * np.finfo(float).eps:
        raise ValidationError("rel_tol below 50 machine epsilons needs a positive abs_tol")
    if singular_exponent:
        a = float(singular_exponent)

        def full(w):
            return w**a * f(w) if w > 0 else 0.0
    else:
        full = f

    if cutoff is None:
        return _quad_checked(full, 0.0, math.inf, rel_tol, abs_tol, limit, None)

    upper = float(cutoff)
    for _ in range(8):
        pts = sorted(p for p in (points or ()) if 0.0 < p < upper)
        if singular_exponent:
            head_end = pts.pop(0) if pts else upper
            value = _quad_checked(f, 0.0, head_end, rel_tol, abs_tol, limit, None,
                                  weight="alg", wvar=(a, 0.0))
            if head_end < upper:
                value += _quad_checked(full, head_end, upper, rel_tol, abs_tol, limit, pts)
        else:
            value = _quad_checked(full, 0.0, upper, rel_tol, abs_tol, limit, pts)
        if tail_bound is None:
            return value
        tail = tail_bound(upper)
        if tail <= max(rel_tol * abs(value), abs_tol):
            return value
        upper *= 2.0
    raise QuadratureError("tail bound never fell below tolerance", value, tail)


def _quad_checked(f, a, b, rel_tol, abs_tol, limit, points, **extra) -> float:
    kw = dict(epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1, **extra)
    if points:
        kw["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = integrate.quad(f, a, b, **kw)
    value, err = float(out[0]), float(out[1])
    ier = out[2].get("ier", 0) if len(out) < 4 else 1
    if not math.isfinite(value):
        raise QuadratureError("integrand produced a non-finite value", value, err)
    if ier != 0 and err > max(rel_tol * abs(value), abs_tol):
        raise QuadratureError(f"quadrature did not converge on [{a}, {b}]", value, err)
    return value


def ode_rk4(
    deriv: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_span: tuple[float, float],
    dt: float,
    *,
    sample_every: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step fourth-order Runge-Kutta.

    The step is shrunk so that an integer number of steps lands exactly on
    ``t_span[1]``. Returns ``(times, states)`` sampled every ``sample_every`` steps
    (the final time is always included).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0, t1 = map(float, t_span)
    y = np.array(y0, dtype=np.result_type(np.asarray(y0), float), copy=True)
    n = max(0, math.ceil((t1 - t0) / dt - 1e-9))
    if n == 0:
        return np.array([t0]), y[None, ...].copy()
    h = (t1 - t0) / n

    times = [t0]
    states = [y.copy()]
    t = t0
    for i in range(1, n + 1):
        k1 = deriv(t, y)
        k2 = deriv(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = deriv(t + h, y + h * k3)
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            raise IntegrationError("non-finite state", t)
        y = y_next
        t = t0 + i * h
        if i % sample_every == 0 or i == n:
            times.append(t)
            states.append(y.copy())
    return np.asarray(times), np.asarray(states)


def sum_series(
    term: Callable[[np.ndarray], np.ndarray],
    rel_tol: float = SERIES_REL_TOL,
    m_max: int = SERIES_M_MAX,
    *,
    start: int = 1,
    tail: Callable[[int], float] | None = None,
) -> SeriesSum:
    """Sum ``term(m)`` for m = start, start+1, ...

    ``term`` is called on integer arrays (block evaluation). Summation stops once
    ``|term(m)| < rel_tol * |partial sum|`` or after ``m_max``. An optional
    ``tail(M)``, an estimate of the remainder over m > M, is added to the partial sum
    in either case (slowly decaying series need it even after the stopping test
    fires). Without a tail, reaching ``m_max`` leaves ``converged`` False.
    """
    total = 0.0
    m = start
    block = 64
    n_terms = 0
    last = start + m_max - 1
    while m <= last:
        stop = min(m + block - 1, last)
        ms = np.arange(m, stop + 1)
        vals = np.asarray(term(ms), dtype=float)
        if vals.shape != ms.shape:
            vals = np.array([float(term(int(k))) for k in ms])
        # locate the first term below tolerance relative to the running sum
        csum = total + np.cumsum(vals)
        small = np.abs(vals) < rel_tol * np.abs(csum)
        small |= (vals == 0.0) & (csum == 0.0)
        if np.any(small):
            k = int(np.argmax(small))
            value = float(csum[k])
            if tail is not None:
                return SeriesSum(value + float(tail(int(ms[k]))), True, n_terms + k + 1, True)
            return SeriesSum(value, True, n_terms + k + 1)
        total = float(csum[-1])
        n_terms += ms.size
        m = stop + 1
        block = min(block * 2, 1 << 16)
    if tail is not None:
        return SeriesSum(total + float(tail(last)), True, n_terms, tail_used=True)
    return SeriesSum(total, False, n_terms)
