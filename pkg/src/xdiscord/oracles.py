"""Brute-force evaluations of LQU and trace discord straight from their definitions.

Nothing here uses the closed forms of :mod:`xdiscord.measures`: the LQU oracle
minimizes the skew information -1/2 Tr([sqrt(rho), K]^2) over K = n.sigma (x) I with a
generic matrix square root, and the trace-discord oracle searches classical-quantum
states chi = p Pi_+ (x) rho_1 + (1-p) Pi_- (x) rho_2 for the smallest ||rho - chi||_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import as_hermitian, sqrt_psd
from .states import PAULI, XState

_SIG = np.array(PAULI[1:])  # (3, 2, 2)
_SIG_A = np.array([np.kron(s, PAULI[0]) for s in PAULI[1:]])  # sigma_i (x) I
_SIG_B = np.array([np.kron(PAULI[0], s) for s in PAULI[1:]])  # I (x) sigma_i
_I4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class SphereGrid:
    n_theta: int = 91  # polar angles 0..90 degrees: one hemisphere suffices since K and -K agree
    n_phi: int = 360
    refinement_rounds: int = 1
    polish_starts: int = 3

    def directions(self) -> np.ndarray:
        th = np.linspace(0.0, 0.5 * math.pi, self.n_theta)
        ph = np.linspace(0.0, 2.0 * math.pi, self.n_phi, endpoint=False)
        T, P = np.meshgrid(th, ph, indexing="ij")
        return np.stack([T.ravel(), P.ravel()], axis=1)


@dataclass(frozen=True)
class CQParametrization:
    """chi = p Pi_+ (x) rho_1 + (1 - p) Pi_- (x) rho_2 with Pi_+- = (I +- n.sigma) / 2."""

    n: np.ndarray
    p: float
    bloch1: np.ndarray
    bloch2: np.ndarray

    def matrix(self) -> np.ndarray:
        return _cq_matrices(self.to_vector()[None, :])[0]

    def to_vector(self) -> np.ndarray:
        n = np.asarray(self.n, dtype=float)
        theta = math.acos(max(-1.0, min(1.0, n[2] / np.linalg.norm(n))))
        phi = math.atan2(n[1], n[0])
        return np.concatenate([[theta, phi, self.p], self.bloch1, self.bloch2])


@dataclass
class BruteForceResult:
    value: float
    best: np.ndarray
    spread: float  # max - min over restart results
    values: list[float] = field(default_factory=list)


# --- Nelder-Mead over a batch of independent starts ---------------------------------

def nelder_mead_batch(f, x0: np.ndarray, scale=0.1, *, xatol: float = 1e-8,
                      fatol: float = 1e-12, max_evals: int = 2000):
    """Minimize ``f`` from every row of ``x0`` at once.

    ``f`` maps a (B, d) array to B values. Each start runs the standard
    reflect/expand/contract/shrink simplex method (coefficients 1, 2, 1/2, 1/2);
    all starts advance in lockstep so that each step is a single vectorized
    evaluation. A start is frozen once its simplex spread is below ``xatol`` in the
    parameters and ``fatol`` in the values, or after ``max_evals`` evaluations.
    Returns (x_best, f_best) with shapes (B, d) and (B,).
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    B, d = x0.shape
    scale = np.broadcast_to(np.asarray(scale, dtype=float), (d,))
    simplex = np.repeat(x0[:, None, :], d + 1, axis=1)
    for k in range(d):
        simplex[:, k + 1, k] += scale[k]
    fs = f(simplex.reshape(-1, d)).reshape(B, d + 1)
    evals = np.full(B, d + 1)
    active = np.ones(B, dtype=bool)
    rows = np.arange(B)

    while True:
        order = np.argsort(fs, axis=1)
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        fs = np.take_along_axis(fs, order, axis=1)
        x_spread = np.max(np.abs(simplex[:, 1:] - simplex[:, :1]), axis=(1, 2))
        f_spread = np.abs(fs[:, -1] - fs[:, 0])
        active &= ~((x_spread <= xatol) & (f_spread <= fatol))
        active &= evals < max_evals
        if not active.any():
            break
        idx = rows[active]
        S, F = simplex[idx], fs[idx]
        worst = S[:, -1]
        centroid = S[:, :-1].mean(axis=1)
        xr = centroid + (centroid - worst)
        xe = centroid + 2.0 * (centroid - worst)
        xoc = centroid + 0.5 * (centroid - worst)
        xic = centroid - 0.5 * (centroid - worst)
        trial = f(np.concatenate([xr, xe, xoc, xic]))
        n = len(idx)
        fr, fe, foc, fic = trial[:n], trial[n:2 * n], trial[2 * n:3 * n], trial[3 * n:]
        evals[idx] += 4

        new_x = worst.copy()
        new_f = F[:, -1].copy()
        shrink = np.zeros(n, dtype=bool)

        expand = fr < F[:, 0]
        use_e = expand & (fe < fr)
        use_r = (expand & ~use_e) | ((fr >= F[:, 0]) & (fr < F[:, -2]))
        outside = (fr >= F[:, -2]) & (fr < F[:, -1])
        inside = fr >= F[:, -1]
        acc_oc = outside & (foc <= fr)
        acc_ic = inside & (fic < F[:, -1])
        shrink = (outside & ~acc_oc) | (inside & ~acc_ic)

        for mask, xs, fv in ((use_e, xe, fe), (use_r, xr, fr), (acc_oc, xoc, foc), (acc_ic, xic, fic)):
            new_x[mask] = xs[mask]
            new_f[mask] = fv[mask]
        S[:, -1] = new_x
        F[:, -1] = new_f

        if shrink.any():
            sidx = np.nonzero(shrink)[0]
            best = S[sidx, :1]
            S[sidx, 1:] = best + 0.5 * (S[sidx, 1:] - best)
            F[sidx, 1:] = f(S[sidx, 1:].reshape(-1, d)).reshape(len(sidx), d)
            evals[idx[sidx]] += d
        simplex[idx], fs[idx] = S, F

    return simplex[:, 0], fs[:, 0]


# --- LQU --------------------------------------------------------------------------

def skew_information_operator(rho: np.ndarray, K: np.ndarray, sqrt_rho: np.ndarray | None = None) -> float:
    """-1/2 Tr([sqrt(rho), K]^2) for a 4x4 observable K."""
    r = sqrt_psd(rho) if sqrt_rho is None else sqrt_rho
    c = r @ K - K @ r
    return float(-0.5 * np.trace(c @ c).real)


def _skew_gram(x: XState) -> np.ndarray:
    """G with skew information(n.sigma (x) I) = n^T G n, from commutators."""
    r = sqrt_psd(x.matrix())
    comm = np.einsum("ij,ajk->aik", r, _SIG_A) - np.einsum("aij,jk->aik", _SIG_A, r)
    return -0.5 * np.einsum("aij,bji->ab", comm, comm).real


def skew_information(x: XState, n) -> float:
    """Skew information of the local observable n.sigma (x) I (commutator definition)."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    K = np.einsum("a,aij->ij", n, _SIG_A)
    return skew_information_operator(x.matrix(), K)


def _unit(theta, phi):
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def lqu_bruteforce(x: XState, grid: SphereGrid | None = None) -> float:
    """Minimum skew information over directions: grid search plus simplex polish."""
    grid = grid or SphereGrid()
    G = _skew_gram(x)
    angles = grid.directions()
    n = _unit(angles[:, 0], angles[:, 1])
    vals = np.einsum("ka,ab,kb->k", n, G, n)
    starts = angles[np.argsort(vals)[: grid.polish_starts]]

    def f(a):
        m = _unit(a[:, 0], a[:, 1])
        return np.einsum("ka,ab,kb->k", m, G, m)

    best = float(vals.min())
    step = math.radians(1.0)
    for _ in range(grid.refinement_rounds):
        xs, fs = nelder_mead_batch(f, starts, scale=step, xatol=1e-10, fatol=1e-15)
        best = min(best, float(fs.min()))
        starts, step = xs, step * 0.1
    return min(1.0, max(0.0, best))


def lqu_random_observables(x: XState, n_samples: int, rng: np.random.Generator) -> float:
    """Smallest skew information over random 2x2 observables U diag(1,-1) U^dagger on qubit 1."""
    r = sqrt_psd(x.matrix())
    rho = x.matrix()
    best = math.inf
    z = np.diag([1.0, -1.0]).astype(complex)
    for _ in range(n_samples):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, _ = np.linalg.qr(a)
        K = np.kron(q @ z @ q.conj().T, PAULI[0])
        best = min(best, skew_information_operator(rho, K, r))
    return best


# --- trace discord ----------------------------------------------------------------

def _project(v: np.ndarray) -> np.ndarray:
    """Map raw parameter rows onto the feasible set (p in [0,1], |r_k| <= 1)."""
    v = np.array(v, dtype=float, copy=True)
    v[:, 2] = np.clip(v[:, 2], 0.0, 1.0)
    for sl in (slice(3, 6), slice(6, 9)):
        norm = np.linalg.norm(v[:, sl], axis=1)
        over = norm > 1.0
        v[over, sl] /= norm[over, None]
    return v


def _cq_matrices(v: np.ndarray) -> np.ndarray:
    v = _project(v)
    n = _unit(v[:, 0], v[:, 1])
    ns = np.einsum("ka,aij->kij", n, _SIG)
    I2 = PAULI[0]
    pi_p = 0.5 * (I2 + ns)
    pi_m = 0.5 * (I2 - ns)
    rho1 = 0.5 * (I2 + np.einsum("ka,aij->kij", v[:, 3:6], _SIG))
    rho2 = 0.5 * (I2 + np.einsum("ka,aij->kij", v[:, 6:9], _SIG))
    p = v[:, 2][:, None, None, None, None]
    chi = (p * np.einsum("kij,klm->kiljm", pi_p, rho1)
           + (1.0 - p) * np.einsum("kij,klm->kiljm", pi_m, rho2))
    return chi.reshape(-1, 4, 4)


def _post_measurement(rho: np.ndarray, theta: float, phi: float) -> np.ndarray:
    """Parameters of the state obtained by measuring qubit 1 along (theta, phi)."""
    n = _unit(np.array(theta), np.array(phi))
    ns = np.einsum("a,aij->ij", n, _SIG)
    out = [theta, phi]
    blochs = []
    probs = []
    for sign in (1.0, -1.0):
        proj = np.kron(0.5 * (PAULI[0] + sign * ns), PAULI[0])
        pk = float(np.trace(proj @ rho).real)
        probs.append(pk)
        if pk > 1e-12:
            cond = proj @ rho @ proj / pk
            blochs.append([float(np.trace(cond @ s).real) for s in _SIG_B])
        else:
            blochs.append([0.0, 0.0, 0.0])
    out.append(probs[0])
    out.extend(blochs[0])
    out.extend(blochs[1])
    return np.array(out)


def trace_discord_bruteforce(x: XState, restarts: int = 50, seed: int = 0, *,
                             max_evals: int = 2000) -> BruteForceResult:
    """Half the smallest trace distance from rho to a classical-quantum state.

    Multi-start batched simplex search over the 9 CQ parameters; starts include
    post-measurement states along the coordinate axes and along the coherence-phase
    directions, the rest are random. The result is always an upper bound.
    """
    rho = as_hermitian(x.matrix())
    rng = np.random.default_rng(seed)
    ph14 = float(np.angle(x.rho14)) if abs(x.rho14) > 0 else 0.0
    ph23 = float(np.angle(x.rho23)) if abs(x.rho23) > 0 else 0.0
    axes = [(0.0, 0.0), (0.5 * math.pi, 0.0), (0.5 * math.pi, 0.5 * math.pi)]
    mid = 0.5 * (ph14 + ph23)
    axes += [(0.5 * math.pi, mid), (0.5 * math.pi, mid + 0.5 * math.pi),
             (0.5 * math.pi, 0.5 * (ph23 - ph14)), (0.5 * math.pi, 0.5 * (ph23 - ph14) + 0.5 * math.pi)]
    starts = [_post_measurement(rho, th, ph) for th, ph in axes]
    while len(starts) < restarts:
        th = math.acos(rng.uniform(-1.0, 1.0))
        ph = rng.uniform(0.0, 2.0 * math.pi)
        v = _post_measurement(rho, th, ph)
        v[2:] += rng.normal(scale=0.1, size=7)
        starts.append(v)
    starts = np.array(starts[:max(restarts, 1)])

    def objective(v):
        diff = rho[None, :, :] - _cq_matrices(v)
        return 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=1)

    xs, fs = nelder_mead_batch(objective, starts, scale=0.2, xatol=1e-8, fatol=1e-12,
                               max_evals=max_evals)
    # one re-simplexed round from the best few escapes premature simplex collapse
    top = np.argsort(fs)[: min(8, len(fs))]
    xs2, fs2 = nelder_mead_batch(objective, _project(xs[top]), scale=0.02, xatol=1e-8,
                                 fatol=1e-12, max_evals=max_evals)
    all_f = np.concatenate([fs, fs2])
    all_x = np.concatenate([xs, xs2])
    k = int(np.argmin(all_f))
    return BruteForceResult(float(all_f[k]), _project(all_x[k:k + 1])[0],
                            float(all_f.max() - all_f.min()), [float(v) for v in fs])
