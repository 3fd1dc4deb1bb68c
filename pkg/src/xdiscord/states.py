"""Two-qubit X states.

Conventions, used everywhere in the package: the computational basis is ordered
|00>, |01>, |10>, |11>; Pauli labels 0..3 are (I, x, y, z); the first tensor factor
is qubit 1 (the measured / probed party).

An X state has non-zero entries only on the diagonal and anti-diagonal::

    rho11   0      0      rho14
    0       rho22  rho23  0
    0       rho32  rho33  0
    rho41   0      0      rho44

so it splits into the outer block {|00>, |11>} and the inner block {|01>, |10>}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidStateError, ShapeError

STATE_TOL = 1e-9
#: Block determinants below RANK_TOL * trace**2 are rounding noise of a rank-1 block.
RANK_TOL = 16 * np.finfo(float).eps
#: A block with t + 2 sqrt(d) below this is numerically zero.
DEGENERATE_BLOCK = 1e-14

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)
#: PAULI2[a, b] = sigma_a (x) sigma_b
PAULI2 = np.array([[np.kron(a, b) for b in PAULI] for a in PAULI])

# (alpha, beta) pairs that can be non-zero for an X state
X_ENTRIES = ((0, 0), (0, 3), (3, 0), (3, 3), (1, 1), (2, 2), (1, 2), (2, 1))
_X_MASK = np.zeros((4, 4), dtype=bool)
for _a, _b in X_ENTRIES:
    _X_MASK[_a, _b] = True


@dataclass(frozen=True)
class XState:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0j
    rho23: complex = 0j

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.rho11, self.rho22, self.rho33, self.rho44
        m[0, 3] = self.rho14
        m[3, 0] = np.conj(self.rho14)
        m[1, 2] = self.rho23
        m[2, 1] = np.conj(self.rho23)
        return m

    @property
    def populations(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)

    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    @classmethod
    def from_matrix(cls, m, tol: float = STATE_TOL) -> "XState":
        """Read an X state out of a 4x4 matrix; off-X entries must vanish."""
        a = np.asarray(m, dtype=complex)
        if a.shape != (4, 4):
            raise ShapeError(f"expected a 4x4 matrix, got {a.shape}")
        mask = np.zeros((4, 4), dtype=bool)
        mask[np.diag_indices(4)] = True
        mask[[0, 3, 1, 2], [3, 0, 2, 1]] = True
        if np.max(np.abs(a[~mask])) > tol:
            raise ShapeError("matrix has entries outside the X pattern")
        if abs(a[0, 3] - np.conj(a[3, 0])) > tol or abs(a[1, 2] - np.conj(a[2, 1])) > tol:
            raise ShapeError("matrix is not Hermitian")
        d = np.real(np.diag(a))
        return cls(float(d[0]), float(d[1]), float(d[2]), float(d[3]),
                   complex(0.5 * (a[0, 3] + np.conj(a[3, 0]))),
                   complex(0.5 * (a[1, 2] + np.conj(a[2, 1]))))


@dataclass(frozen=True)
class FanoBloch:
    """Correlation tensor T[a, b] = Tr(rho sigma_a (x) sigma_b)."""

    T: np.ndarray

    def __getitem__(self, idx):
        return float(self.T[idx])


@dataclass(frozen=True)
class TildeR:
    """Fano-Bloch entries of the phase-removed state (real, non-negative anti-diagonal)."""

    R11: float
    R22: float
    R33: float
    R03: float
    R30: float


@dataclass(frozen=True)
class XEigensystem:
    t1: float
    d1: float
    t2: float
    d2: float
    lam: np.ndarray  # (lambda1, lambda2, lambda3, lambda4); 1, 4 from the outer block
    sqrt_lam: np.ndarray

    @property
    def s1(self) -> float:
        """sqrt(lambda1) + sqrt(lambda4) = sqrt(t1 + 2 sqrt(d1))."""
        return math.sqrt(self.t1 + 2.0 * math.sqrt(self.d1))

    @property
    def s2(self) -> float:
        """sqrt(lambda2) + sqrt(lambda3) = sqrt(t2 + 2 sqrt(d2))."""
        return math.sqrt(self.t2 + 2.0 * math.sqrt(self.d2))


@dataclass(frozen=True)
class SqrtFanoBloch:
    """Coefficients of sqrt(rho) = 1/4 sum R[c, d] sigma_c (x) sigma_d."""

    R00: float
    R03: float
    R30: float
    R11: float
    R12: float
    R21: float
    R22: float
    R33: float

    def tensor(self) -> np.ndarray:
        R = np.zeros((4, 4))
        R[0, 0], R[0, 3], R[3, 0], R[3, 3] = self.R00, self.R03, self.R30, self.R33
        R[1, 1], R[1, 2], R[2, 1], R[2, 2] = self.R11, self.R12, self.R21, self.R22
        return R


def validate(x: XState, tol: float = STATE_TOL) -> XState:
    """Check trace, positivity of populations and of both 2x2 blocks.

    Populations in [-tol, 0) are clamped to zero. Raises :class:`InvalidStateError`
    naming the first violated invariant.
    """
    vals = (*x.populations, x.rho14.real, x.rho14.imag, x.rho23.real, x.rho23.imag)
    if not all(math.isfinite(v) for v in vals):
        raise InvalidStateError("finite", "entries must be finite")
    tr = x.trace()
    if abs(tr - 1.0) > tol:
        raise InvalidStateError("trace", f"populations sum to {tr!r}, expected 1")
    for name, p in zip(("rho11", "rho22", "rho33", "rho44"), x.populations):
        if p < -tol:
            raise InvalidStateError("population", f"{name} = {p!r} is negative")
    pops = [max(p, 0.0) for p in x.populations]
    if abs(x.rho14) ** 2 > pops[0] * pops[3] + tol:
        raise InvalidStateError("block-positivity(14)", "|rho14|^2 exceeds rho11*rho44")
    if abs(x.rho23) ** 2 > pops[1] * pops[2] + tol:
        raise InvalidStateError("block-positivity(23)", "|rho23|^2 exceeds rho22*rho33")
    return replace(x, rho11=pops[0], rho22=pops[1], rho33=pops[2], rho44=pops[3],
                   rho14=complex(x.rho14), rho23=complex(x.rho23))


def from_bell_diagonal(c1: float, c2: float, c3: float) -> XState:
    """Bell-diagonal state 1/4 (I + sum_i c_i sigma_i (x) sigma_i)."""
    x = XState((1 + c3) / 4, (1 - c3) / 4, (1 - c3) / 4, (1 + c3) / 4,
               complex((c1 - c2) / 4), complex((c1 + c2) / 4))
    return validate(x)


def to_fano_bloch(x: XState) -> FanoBloch:
    T = np.einsum("abij,ji->ab", PAULI2, x.matrix()).real
    T[0, 0] = 1.0 if abs(T[0, 0] - 1.0) <= STATE_TOL else T[0, 0]
    return FanoBloch(T)


def from_fano_bloch(fb: FanoBloch | np.ndarray, tol: float = 1e-12) -> XState:
    T = np.asarray(fb.T if isinstance(fb, FanoBloch) else fb, dtype=float)
    if T.shape != (4, 4):
        raise ShapeError(f"expected a 4x4 tensor, got {T.shape}")
    if T[0, 0] != 1.0:
        raise ShapeError(f"T[0, 0] must be 1, got {T[0, 0]!r}")
    off = np.abs(T[~_X_MASK])
    if off.size and off.max() > tol:
        raise ShapeError("tensor has non-zero entries outside the X pattern")
    rho = 0.25 * np.einsum("ab,abij->ij", np.where(_X_MASK, T, 0.0), PAULI2)
    return XState.from_matrix(rho)


def canonicalize(x: XState) -> TildeR:
    """Fano-Bloch data of the state with both coherence phases removed locally."""
    a14, a23 = abs(x.rho14), abs(x.rho23)
    return TildeR(
        R11=2.0 * (a23 + a14),
        R22=2.0 * (a23 - a14),
        R33=1.0 - 2.0 * (x.rho22 + x.rho33),
        R03=2.0 * (x.rho11 + x.rho33) - 1.0,
        R30=2.0 * (x.rho11 + x.rho22) - 1.0,
    )


def _block(p: float, q: float, coh: complex) -> tuple[float, float, float]:
    """Trace, clamped determinant and discriminant sqrt of [[p, coh], [coh*, q]]."""
    t = p + q
    d = p * q - abs(coh) ** 2
    if d < -STATE_TOL:
        raise InvalidStateError("block-positivity", f"block determinant {d!r} is negative")
    if d < RANK_TOL * t * t:
        d = 0.0
    # (p - q)^2 + 4|coh|^2 == t^2 - 4d, but never negative in floating point
    disc = math.sqrt((p - q) ** 2 + 4.0 * abs(coh) ** 2)
    return t, d, disc


def x_eigensystem(x: XState) -> XEigensystem:
    t1, d1, r1 = _block(x.rho11, x.rho44, x.rho14)
    t2, d2, r2 = _block(x.rho22, x.rho33, x.rho23)
    l1 = 0.5 * (t1 + r1)
    l2 = 0.5 * (t2 + r2)
    # small eigenvalues from det / large one: no cancellation
    l4 = d1 / l1 if l1 > 0 else 0.0
    l3 = d2 / l2 if l2 > 0 else 0.0
    lam = np.array([l1, l2, l3, l4])
    return XEigensystem(t1, d1, t2, d2, lam, np.sqrt(np.clip(lam, 0.0, None)))


def _sqrt_block(p: float, q: float, coh: complex, t: float, d: float):
    s_sq = t + 2.0 * math.sqrt(d)
    if s_sq < DEGENERATE_BLOCK:
        return 0.0, 0.0, 0j, 0.0
    s = math.sqrt(s_sq)
    rd = math.sqrt(d)
    return (p + rd) / s, (q + rd) / s, coh / s, s


def sqrt_xstate(x: XState) -> tuple[XState, SqrtFanoBloch]:
    """Closed-form square root of an X state and its Fano-Bloch coefficients.

    Each 2x2 block B with trace t and determinant d has sqrt(B) = (B + sqrt(d) I) / s
    with s = sqrt(t + 2 sqrt(d)); a numerically vanishing block maps to zero.
    """
    es = x_eigensystem(x)
    p, r, q, s1 = _sqrt_block(x.rho11, x.rho44, x.rho14, es.t1, es.d1)
    u, w, v, s2 = _sqrt_block(x.rho22, x.rho33, x.rho23, es.t2, es.d2)
    root = XState(p, u, w, r, q, v)

    T = to_fano_bloch(x).T
    inv1 = 1.0 / s1 if s1 > 0 else 0.0
    inv2 = 1.0 / s2 if s2 > 0 else 0.0
    sp = T[3, 0] + T[0, 3]
    sm = T[3, 0] - T[0, 3]
    coeffs = SqrtFanoBloch(
        R00=s1 + s2,
        R03=0.5 * sp * inv1 - 0.5 * sm * inv2,
        R30=0.5 * sp * inv1 + 0.5 * sm * inv2,
        R11=0.5 * (T[1, 1] + T[2, 2]) * inv2 + 0.5 * (T[1, 1] - T[2, 2]) * inv1,
        R12=0.5 * (T[1, 2] - T[2, 1]) * inv2 + 0.5 * (T[1, 2] + T[2, 1]) * inv1,
        R21=0.5 * (T[1, 2] + T[2, 1]) * inv1 - 0.5 * (T[1, 2] - T[2, 1]) * inv2,
        R22=0.5 * (T[1, 1] + T[2, 2]) * inv2 - 0.5 * (T[1, 1] - T[2, 2]) * inv1,
        R33=s1 - s2,
    )
    return root, coeffs


def bell_state_phi_plus() -> XState:
    return XState(0.5, 0.0, 0.0, 0.5, 0.5 + 0j, 0j)


def product_state(p: float, q: float) -> XState:
    """diag(p, 1-p) (x) diag(q, 1-q)."""
    return XState(p * q, p * (1 - q), (1 - p) * q, (1 - p) * (1 - q))


def maximally_mixed() -> XState:
    return XState(0.25, 0.25, 0.25, 0.25)


def random_xstate(rng: np.random.Generator) -> XState:
    """Random X state: Dirichlet populations, coherences uniform inside their disks."""
    pops = rng.dirichlet(np.ones(4))
    r14 = math.sqrt(pops[0] * pops[3]) * math.sqrt(rng.random())
    r23 = math.sqrt(pops[1] * pops[2]) * math.sqrt(rng.random())
    ph = rng.uniform(0, 2 * math.pi, size=2)
    return XState(*map(float, pops), complex(r14 * np.exp(1j * ph[0])), complex(r23 * np.exp(1j * ph[1])))


def random_pure_xstate(rng: np.random.Generator) -> XState:
    """Random pure X state, a|00> + d|11> or b|01> + c|10> with equal probability."""
    theta = rng.uniform(0, math.pi / 2)
    phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
    ca, sa = math.cos(theta), math.sin(theta)
    coh = complex(ca * sa * np.conj(phase))
    if rng.random() < 0.5:
        return XState(ca * ca, 0.0, 0.0, sa * sa, coh, 0j)
    return XState(0.0, ca * ca, sa * sa, 0.0, 0j, coh)
