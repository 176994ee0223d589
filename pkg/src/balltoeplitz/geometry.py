"""The unit ball B^n, its matrix symmetry group, and the Cayley transform.

Matrices act on B^n = {z in C^n : |z| < 1} by fractional linear maps
(a z + v)/(w^t z + d) in the block form A = [[a, v], [w^t, d]].  The group of
interest preserves the form J = diag(-I_n, 1): A J A* = J, det A = 1.  The
Cayley transform maps B^n biholomorphically onto the unbounded domain
D_n = {Im(z_n) - |z'|^2 > 0}.

Covering elements carry an explicit phase coordinate x: the element acts
through its phase-free base matrix, while fractional powers of the automorphy
factor resolve their branch through x (factor out e^{2 pi i x}, then take the
principal power of the remainder, which must stay in the right half-plane).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchCutError, CayleyPoleError, SingularDenominatorError

MEMBERSHIP_TOL = 1e-10
ROUNDTRIP_TOL = 1e-12
TWO_PI = 2.0 * np.pi


def _as_coords(z, n=None):
    """Accept a BallPoint/SiegelPoint or a bare coordinate array."""
    c = np.asarray(getattr(z, "coords", z), dtype=complex)
    if n is not None and c.shape != (n,):
        raise ValueError(f"expected a point of C^{n}, got shape {c.shape}")
    return c


@dataclass(frozen=True)
class BallPoint:
    """A point of the open unit ball of C^n."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).reshape(-1)
        object.__setattr__(self, "coords", c)
        if not np.linalg.norm(c) < 1.0:
            raise ValueError(f"|z| = {np.linalg.norm(c):.6f} is not < 1")

    @property
    def n(self):
        return self.coords.shape[0]


@dataclass(frozen=True)
class SiegelPoint:
    """A point of the unbounded domain D_n: Im(z_n) - |z'|^2 > 0."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).reshape(-1)
        object.__setattr__(self, "coords", c)
        if not self.height > 0.0:
            raise ValueError(f"Im(z_n) - |z'|^2 = {self.height:.6f} is not > 0")

    @property
    def height(self):
        c = self.coords
        return float(c[-1].imag - np.sum(np.abs(c[:-1]) ** 2))


def form_matrix(n):
    """The sesquilinear form J = diag(-I_n, 1)."""
    J = -np.eye(n + 1, dtype=complex)
    J[n, n] = 1.0
    return J


@dataclass(frozen=True)
class GroupElement:
    """A matrix of the ball symmetry group: det = 1 and A J A* = J."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError("matrix must be square of size n+1 >= 2")
        object.__setattr__(self, "matrix", m)
        J = form_matrix(self.n)
        if abs(np.linalg.det(m) - 1.0) > MEMBERSHIP_TOL:
            raise ValueError(f"det = {np.linalg.det(m)} is not 1")
        defect = np.max(np.abs(m @ J @ m.conj().T - J))
        if defect > MEMBERSHIP_TOL:
            raise ValueError(f"A J A* - J has magnitude {defect:.2e}")

    @property
    def n(self):
        return self.matrix.shape[0] - 1

    def inverse(self):
        """A^{-1} = J A* J, exact in the group."""
        J = form_matrix(self.n)
        return GroupElement(J @ self.matrix.conj().T @ J)

    def __matmul__(self, other):
        return GroupElement(self.matrix @ other.matrix)


@dataclass(frozen=True)
class CoveringElement:
    """A subgroup element in covering coordinates.

    `torus` holds angles in [0, 1); `reals` holds the family's noncompact
    parameters in chart order; `x` is the covering phase; `base_matrix` is the
    phase-free matrix lift built by `balltoeplitz.groups` (multiplying it by
    e^{2 pi i x} recovers the projected matrix).
    """

    family: str
    torus: np.ndarray
    reals: np.ndarray
    x: float
    base_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.mod(np.asarray(self.torus, dtype=float).reshape(-1), 1.0)
        r = np.asarray(self.reals, dtype=float).reshape(-1)
        if not np.all(np.isfinite(r)):
            raise ValueError("real parameters must be finite")
        object.__setattr__(self, "torus", t)
        object.__setattr__(self, "reals", r)
        object.__setattr__(self, "base_matrix",
                           np.asarray(self.base_matrix, dtype=complex))

    @property
    def n(self):
        return self.base_matrix.shape[0] - 1

    def matrix(self):
        """The projected matrix e^{2 pi i x} * base_matrix."""
        return np.exp(2j * np.pi * self.x) * self.base_matrix

    def det_one_defect(self):
        """|det(matrix()) - 1|; zero exactly on the honest covering subgroup."""
        return abs(np.linalg.det(self.matrix()) - 1.0)

    def is_in_covering_subgroup(self, tol=1e-12):
        return self.det_one_defect() <= tol


def mobius_action_many(matrix, Z):
    """Apply the fractional linear map to a batch Z of shape (..., n)."""
    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0] - 1
    a = matrix[:n, :n]
    v = matrix[:n, n]
    w = matrix[n, :n]
    d = matrix[n, n]
    denom = Z @ w + d
    if np.min(np.abs(denom)) < 1e-14:
        raise SingularDenominatorError(
            "w^t z + d vanished; input violates the group/ball invariants")
    return (Z @ a.T + v) / denom[..., None]


def mobius_action(g, z):
    """g . z = (a z + v)/(w^t z + d).

    `g` may be a GroupElement, CoveringElement, or a raw matrix (the action is
    projective, so any nonzero scalar multiple acts identically).
    """
    if isinstance(g, CoveringElement):
        matrix = g.base_matrix
    else:
        matrix = getattr(g, "matrix", g)
    out = mobius_action_many(matrix, _as_coords(z)[None, :])[0]
    return BallPoint(out)


def cayley(z):
    """Biholomorphism B^n -> D_n: zeta_k = i z_k/(1+z_n), zeta_n = i(1-z_n)/(1+z_n)."""
    c = _as_coords(z)
    denom = 1.0 + c[-1]
    if abs(denom) < 1e-14:
        raise CayleyPoleError("z_n = -1 is a pole of the Cayley transform")
    out = np.empty_like(c)
    out[:-1] = 1j * c[:-1] / denom
    out[-1] = 1j * (1.0 - c[-1]) / denom
    return SiegelPoint(out)


def cayley_inv(zeta):
    """Inverse of `cayley`."""
    c = _as_coords(zeta)
    denom = c[-1] + 1j
    if abs(denom) < 1e-14:
        raise CayleyPoleError("zeta_n = -i is a pole of the inverse Cayley transform")
    out = np.empty_like(c)
    out[-1] = (1j - c[-1]) / denom
    out[:-1] = 2.0 * c[:-1] / denom
    return BallPoint(out)


def cayley_matrix(n):
    """The intertwining matrix C: cayley(z) = C . z as a fractional linear map."""
    C = np.zeros((n + 1, n + 1), dtype=complex)
    for j in range(n - 1):
        C[j, j] = 1j
    C[n - 1, n - 1] = -1j
    C[n - 1, n] = 1j
    C[n, n - 1] = 1.0
    C[n, n] = 1.0
    return C


def phase_split_power(value, x, lam):
    """e^{-2 pi i lam x} * rho**(-lam) where rho = e^{-2 pi i x} * value.

    The covering phase is factored out first; the remainder rho must lie in
    the open right half-plane, else the principal power is not validated.
    """
    rho = np.exp(-2j * np.pi * x) * value
    if np.min(np.real(np.atleast_1d(rho))) <= 0.0:
        raise BranchCutError(
            "phase-reduced automorphy factor left the right half-plane")
    return np.exp(-2j * np.pi * lam * x) * rho ** (-lam)
