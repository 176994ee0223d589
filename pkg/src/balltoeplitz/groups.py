"""The five maximal abelian symmetry families of the unit ball.

Each family H comes with a basepoint z0 whose orbit H.z0 is identified with
T^m x R^d in a fixed chart:

    quasi-elliptic   E(n):   t in T^n                     (m=n,   d=0)
    quasi-parabolic  P(n):   (t, y) in T^{n-1} x R        (m=n-1, d=1)
    quasi-hyperbolic H(n):   (t, s) in T^{n-1} x R        (m=n-1, d=1)
    nilpotent        N(n):   (s, b) in R x R^{n-1}        (m=0,   d=n)
    quasi-nilpotent  N(k,n): (t, s, b) in T^k x R x R^{n-k-1}

Elements are lifted to covering coordinates (chart point, phase x); the
noncompact families are built on the Siegel domain side and conjugated back
to the ball through the Cayley matrix.  The weight function D_lambda, the
integral kernel of R R*, and square-integrability of D_lambda are provided in
closed form per family.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError
from .geometry import (BallPoint, CoveringElement, GroupElement, _as_coords,
                       cayley_matrix, mobius_action_many)

QUASI_ELLIPTIC = "quasi-elliptic"
QUASI_PARABOLIC = "quasi-parabolic"
QUASI_HYPERBOLIC = "quasi-hyperbolic"
NILPOTENT = "nilpotent"
QUASI_NILPOTENT = "quasi-nilpotent"

_KINDS = (QUASI_ELLIPTIC, QUASI_PARABOLIC, QUASI_HYPERBOLIC, NILPOTENT,
          QUASI_NILPOTENT)

_ALIASES = {
    "e": QUASI_ELLIPTIC, "en": QUASI_ELLIPTIC, QUASI_ELLIPTIC: QUASI_ELLIPTIC,
    "p": QUASI_PARABOLIC, QUASI_PARABOLIC: QUASI_PARABOLIC,
    "h": QUASI_HYPERBOLIC, QUASI_HYPERBOLIC: QUASI_HYPERBOLIC,
    "n": NILPOTENT, NILPOTENT: NILPOTENT,
    "nk": QUASI_NILPOTENT, QUASI_NILPOTENT: QUASI_NILPOTENT,
}


@dataclass(frozen=True)
class Family:
    """One of the five subgroup families, with its ambient dimension."""

    kind: str
    n: int
    k: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == QUASI_NILPOTENT:
            if self.n < 3 or not 1 <= self.k <= self.n - 2:
                raise ValueError("quasi-nilpotent requires n >= 3 and 1 <= k <= n-2")
        elif self.k:
            raise ValueError("k is only meaningful for the quasi-nilpotent family")
        if self.kind in (QUASI_PARABOLIC, QUASI_HYPERBOLIC) and self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def torus_dim(self):
        return {QUASI_ELLIPTIC: self.n, QUASI_PARABOLIC: self.n - 1,
                QUASI_HYPERBOLIC: self.n - 1, NILPOTENT: 0,
                QUASI_NILPOTENT: self.k}[self.kind]

    @property
    def real_dim(self):
        return {QUASI_ELLIPTIC: 0, QUASI_PARABOLIC: 1, QUASI_HYPERBOLIC: 1,
                NILPOTENT: self.n, QUASI_NILPOTENT: self.n - self.k}[self.kind]

    @property
    def label(self):
        if self.kind == QUASI_NILPOTENT:
            return f"N({self.k},{self.n})"
        letter = {QUASI_ELLIPTIC: "E", QUASI_PARABOLIC: "P",
                  QUASI_HYPERBOLIC: "H", NILPOTENT: "N"}[self.kind]
        return f"{letter}({self.n})"


def quasi_elliptic(n):
    return Family(QUASI_ELLIPTIC, n)


def quasi_parabolic(n):
    return Family(QUASI_PARABOLIC, n)


def quasi_hyperbolic(n):
    return Family(QUASI_HYPERBOLIC, n)


def nilpotent(n):
    return Family(NILPOTENT, n)


def quasi_nilpotent(k, n):
    return Family(QUASI_NILPOTENT, n, k)


def family_from_label(label, n, k=0):
    """Resolve a CLI-style family name ('E', 'P', 'H', 'N', 'NK' or full kind)."""
    kind = _ALIASES.get(label.strip().lower().replace("_", "-"))
    if kind is None:
        raise ValueError(f"unknown family {label!r}")
    return Family(kind, n, k if kind == QUASI_NILPOTENT else 0)


@dataclass(frozen=True)
class OrbitCoordinate:
    """A point of the orbit chart T^m x R^d (angles in [0,1), reals finite)."""

    torus: np.ndarray
    reals: np.ndarray

    def __post_init__(self):
        t = np.mod(np.asarray(self.torus, dtype=float).reshape(-1), 1.0)
        r = np.asarray(self.reals, dtype=float).reshape(-1)
        if not np.all(np.isfinite(r)):
            raise ValueError("real coordinates must be finite")
        object.__setattr__(self, "torus", t)
        object.__setattr__(self, "reals", r)


def orbit_coordinate(family, torus=(), reals=()):
    m = OrbitCoordinate(np.asarray(torus, dtype=float),
                        np.asarray(reals, dtype=float))
    if m.torus.shape != (family.torus_dim,) or m.reals.shape != (family.real_dim,):
        raise ValueError(
            f"{family.label} chart is T^{family.torus_dim} x R^{family.real_dim}; "
            f"got shapes {m.torus.shape}, {m.reals.shape}")
    return m


def identity_coordinate(family):
    return orbit_coordinate(family, np.zeros(family.torus_dim),
                            np.zeros(family.real_dim))


def compose(family, a, b, sign=1):
    """Chart group law: angles add mod 1, reals add (sign=-1 composes with b^{-1})."""
    return orbit_coordinate(family, a.torus + sign * b.torus,
                            a.reals + sign * b.reals)


def _split_reals(family, reals):
    """Split the real chart part into (y-or-s scalar, b vector) per family."""
    if family.kind in (QUASI_PARABOLIC, QUASI_HYPERBOLIC):
        return reals[0], np.zeros(0)
    if family.kind in (NILPOTENT, QUASI_NILPOTENT):
        return reals[0], reals[1:]
    return 0.0, np.zeros(0)


def basepoint(family):
    """The distinguished basepoint z0 of the family's reference orbit."""
    n, k = family.n, family.k
    z0 = np.zeros(n, dtype=complex)
    if family.kind == QUASI_ELLIPTIC:
        z0[:] = 1.0 / np.sqrt(2 * n)
    elif family.kind in (QUASI_PARABOLIC, QUASI_HYPERBOLIC):
        if n > 1:
            z0[: n - 1] = 1.0 / np.sqrt(2 * (n - 1))
    elif family.kind == QUASI_NILPOTENT:
        z0[:k] = 1.0 / np.sqrt(2 * k)
    return BallPoint(z0)


def orbit_point(family, m):
    """The chart point m sent to its ball position on the reference orbit."""
    n = family.n
    t = np.exp(2j * np.pi * m.torus)
    scalar, b = _split_reals(family, m.reals)
    out = np.zeros(n, dtype=complex)
    if family.kind == QUASI_ELLIPTIC:
        out[:] = t / np.sqrt(2 * n)
    elif family.kind == QUASI_PARABOLIC:
        y = scalar
        if n > 1:
            out[: n - 1] = 2.0 * t / (np.sqrt(2 * (n - 1)) * (2.0 - 1j * y))
        out[n - 1] = 1j * y / (2.0 - 1j * y)
    elif family.kind == QUASI_HYPERBOLIC:
        s = scalar
        if n > 1:
            out[: n - 1] = t / (np.sqrt(2 * (n - 1)) * np.cosh(s))
        out[n - 1] = np.tanh(s)
    elif family.kind == NILPOTENT:
        s = scalar
        delta = 0.5 * (-1j * s + b @ b) + 1.0
        out[: n - 1] = -1j * b / delta
        out[n - 1] = 0.5 * (1j * s - b @ b) / delta
    else:
        s, k = scalar, family.k
        delta = 0.5 * (-1j * s + b @ b) + 1.0
        out[:k] = t / (np.sqrt(2 * k) * delta)
        out[k: n - 1] = -1j * b / delta
        out[n - 1] = 0.5 * (1j * s - b @ b) / delta
    return BallPoint(out)


def _siegel_base_matrix(family, m):
    """Phase-free matrix on the Siegel side (identity torus factor a = 1)."""
    n = family.n
    t = np.exp(2j * np.pi * m.torus)
    scalar, b = _split_reals(family, m.reals)

    def nil_block(size, s, b):
        # acts on (z'', z_n, hom): z'' -> z'' + b, z_n -> z_n + 2i<z'',b> + s + i|b|^2
        B = np.eye(size, dtype=complex)
        nb = size - 2
        B[:nb, size - 1] = b
        B[nb, :nb] = 2j * b
        B[nb, size - 1] = scalar + 1j * (b @ b)
        return B

    M = np.eye(n + 1, dtype=complex)
    if family.kind == QUASI_PARABOLIC:
        M[: n - 1, : n - 1] = np.diag(t)
        M[n - 1, n] = scalar
    elif family.kind == QUASI_HYPERBOLIC:
        # exponents chosen so the ball-side block is [[cosh s, sinh s],
        # [sinh s, cosh s]]; the chart then has h . (z', 0) = (tz'/cosh s, tanh s)
        M[: n - 1, : n - 1] = np.diag(t)
        M[n - 1, n - 1] = np.exp(-scalar)
        M[n, n] = np.exp(scalar)
    elif family.kind == NILPOTENT:
        M = nil_block(n + 1, scalar, b)
    elif family.kind == QUASI_NILPOTENT:
        k = family.k
        M[:k, :k] = np.diag(t)
        M[k:, k:] = nil_block(n + 1 - k, scalar, b)
    else:
        raise ValueError("quasi-elliptic has no Siegel-side construction here")
    return M


def base_matrix(family, m):
    """Phase-free ball-side matrix lift of the chart point m."""
    if family.kind == QUASI_ELLIPTIC:
        t = np.exp(2j * np.pi * m.torus)
        return np.diag(np.append(t, 1.0))
    C = cayley_matrix(family.n)
    return np.linalg.solve(C, _siegel_base_matrix(family, m) @ C)


def covering_element(family, torus=(), reals=(), x=0.0):
    """Build a covering element from chart coordinates and a phase."""
    m = orbit_coordinate(family, torus, reals)
    return CoveringElement(family.label, m.torus, m.reals, float(x),
                           base_matrix(family, m))


def lift(family, m, x=0.0):
    """Covering element over the chart point m with the given phase."""
    return CoveringElement(family.label, m.torus, m.reals, float(x),
                           base_matrix(family, m))


def coordinate_of(family, h):
    """The chart point under a covering element."""
    return orbit_coordinate(family, h.torus, h.reals)


def canonical_phase(family, m):
    """The principal phase x0 making the projected matrix lie in the group."""
    return float(-np.sum(m.torus) / (family.n + 1))


def group_element(family, m, x=None):
    """Honest determinant-one group element over m (validates membership)."""
    if x is None:
        x = canonical_phase(family, m)
    return GroupElement(np.exp(2j * np.pi * x) * base_matrix(family, m))


def compose_elements(family, h1, h2):
    """Product of covering elements: charts compose, phases add."""
    m = compose(family, coordinate_of(family, h1), coordinate_of(family, h2))
    return lift(family, m, h1.x + h2.x)


def stabilizer_element(family, j=1):
    """A generator of the basepoint stabilizer: identity chart, phase j/(n+1)."""
    return lift(family, identity_coordinate(family), j / (family.n + 1))


def cocycle(h, z, lam):
    """The automorphy factor j_lambda(h, z) with the covering phase resolved.

    Writes w^t z + d = e^{2 pi i x} rho with rho from the phase-free matrix;
    requires Re(rho) > 0 and returns e^{-2 pi i lam x} rho**(-lam).
    """
    row = h.base_matrix[-1]
    rho = row[:-1] @ _as_coords(z) + row[-1]
    if rho.real <= 0.0:
        raise BranchCutError(
            f"Re(rho) = {rho.real:.3e} <= 0 for family {h.family} at this point")
    return np.exp(-2j * np.pi * lam * h.x) * rho ** (-lam)


def d_lambda_stripped(family, m, lam):
    """The phase-free part of D_lambda = j_lambda(., z0) on the chart."""
    scalar, b = _split_reals(family, m.reals)
    if family.kind == QUASI_ELLIPTIC:
        return 1.0 + 0.0j
    if family.kind == QUASI_PARABOLIC:
        return 2.0 ** lam * (2.0 - 1j * scalar) ** (-lam)
    if family.kind == QUASI_HYPERBOLIC:
        return np.cosh(scalar) ** (-lam) + 0.0j
    return (0.5 * (-1j * scalar + b @ b) + 1.0) ** (-lam)


def d_lambda(family, h, lam):
    """D_lambda(h) = j_lambda(h, z0), covering phase as a separate factor."""
    m = coordinate_of(family, h)
    return np.exp(-2j * np.pi * lam * h.x) * d_lambda_stripped(family, m, lam)


def _torus_mix(t1, t2, weight):
    """weight * sum_i t1_i / t2_i for unit-circle factors given as angles."""
    if t1.size == 0:
        return 0.0 + 0.0j
    return weight * np.sum(np.exp(2j * np.pi * (t1 - t2)))


def rr_kernel(family, h, k, lam):
    """Closed form of the integral kernel of R R* at a pair of elements."""
    n = family.n
    m1, m2 = coordinate_of(family, h), coordinate_of(family, k)
    s1, b1 = _split_reals(family, m1.reals)
    s2, b2 = _split_reals(family, m2.reals)
    phase = np.exp(-2j * np.pi * lam * (h.x - k.x))
    if family.kind == QUASI_ELLIPTIC:
        base = 1.0 - _torus_mix(m1.torus, m2.torus, 1.0 / (2 * n))
    elif family.kind == QUASI_PARABOLIC:
        base = 1.0 - 0.5j * (s1 - s2)
        if n > 1:
            base -= _torus_mix(m1.torus, m2.torus, 1.0 / (2 * (n - 1)))
    elif family.kind == QUASI_HYPERBOLIC:
        base = np.cosh(s1 - s2) + 0.0j
        if n > 1:
            base -= _torus_mix(m1.torus, m2.torus, 1.0 / (2 * (n - 1)))
    elif family.kind == NILPOTENT:
        db = b1 - b2
        base = 0.5 * (-1j * (s1 - s2) + db @ db) + 1.0
    else:
        db = b1 - b2
        base = (0.5 * (-1j * (s1 - s2) + db @ db) + 1.0
                - _torus_mix(m1.torus, m2.torus, 1.0 / (2 * family.k)))
    if base.real <= 0.0:
        raise BranchCutError("R R* kernel base left the right half-plane")
    return phase * base ** (-lam)


def sample_elements(family, count, rng, scale=1.2, phase_scale=0.5):
    """Random covering elements with moderate noncompact parameters."""
    out = []
    for _ in range(count):
        t = rng.uniform(0.0, 1.0, family.torus_dim)
        r = rng.uniform(-scale, scale, family.real_dim)
        x = rng.uniform(-phase_scale, phase_scale)
        out.append(covering_element(family, t, r, x))
    return out


def sample_ball_points(n, count, rng, max_radius=0.9):
    """Random interior points of B^n, radii up to `max_radius`."""
    Z = rng.normal(size=(count, 2 * n)).view(complex)
    Z *= (rng.uniform(0.05, max_radius, count) / np.linalg.norm(Z, axis=1))[:, None]
    return Z


def invariance_check(phi, family, samples=200, rng=None, tol=1e-9, scale=1.0):
    """True iff max |phi(h.z) - phi(z)| <= tol over sampled (h, z) pairs."""
    rng = np.random.default_rng(0) if rng is None else rng
    Z = sample_ball_points(family.n, samples, rng)
    vals = phi(Z)
    worst = 0.0
    for h in sample_elements(family, max(8, samples // 25), rng, scale=scale):
        moved = mobius_action_many(h.base_matrix, Z)
        worst = max(worst, float(np.max(np.abs(phi(moved) - vals))))
    return worst <= tol


# Closed-form references for the |D_lambda|^2 integrals (test oracles).

def dlambda_l2_exact(family, lam):
    """Beta/Gamma closed form of the |D_lambda|^2 integral (valid when finite)."""
    from scipy.special import gammaln
    if family.kind == QUASI_ELLIPTIC:
        return 1.0
    if family.kind == QUASI_PARABOLIC:
        # int (1+y^2/4)^{-lam} dy
        return float(2.0 * np.sqrt(np.pi)
                     * np.exp(gammaln(lam - 0.5) - gammaln(lam)))
    if family.kind == QUASI_HYPERBOLIC:
        # int cosh(s)^{-2 lam} ds
        return float(2.0 ** (2 * lam - 1)
                     * np.exp(2 * gammaln(lam) - gammaln(2 * lam)))
    # nilpotent kinds: 4^lam int db ds (s^2 + (|b|^2+2)^2)^{-lam}
    d = family.real_dim - 1
    nu = 2 * lam - 1
    s_part = np.sqrt(np.pi) * np.exp(gammaln(lam - 0.5) - gammaln(lam))
    b_part = (np.pi ** (d / 2) * 2.0 ** (d / 2 - nu)
              * np.exp(gammaln(nu - d / 2) - gammaln(nu)))
    return float(4.0 ** lam * s_part * b_part)


@dataclass(frozen=True)
class L2NormResult:
    value: float
    diverged: bool
    radius: float


def _doubling_integral(f, start, nodes, weights, tail_tol, radius_cap,
                       two_sided=True, inner_pieces=8):
    """Integrate f with doubling shells; returns (value, diverged, radius).

    Each shell [lo, 2 lo] is integrated with mapped Gauss-Legendre nodes; the
    head [0, start] is split into `inner_pieces` panels.  Doubling stops when
    a shell contributes below tail_tol relative to the running total.
    """
    def panel(lo, hi):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        xs = mid + half * nodes
        vals = f(xs)
        if two_sided:
            vals = vals + f(-xs)
        return half * np.sum(weights * vals)

    edges = np.linspace(0.0, start, inner_pieces + 1)
    total = sum(panel(a, b) for a, b in zip(edges[:-1], edges[1:]))
    lo, prev_shell, prev_ratio = start, None, None
    while lo < radius_cap:
        hi = 2.0 * lo
        pieces = np.linspace(lo, hi, 5)
        shell = sum(panel(a, b) for a, b in zip(pieces[:-1], pieces[1:]))
        total += shell
        if abs(shell) <= tail_tol * max(abs(total), 1.0):
            return float(total), False, hi
        if prev_shell is not None and abs(prev_shell) > 0.0:
            ratio = abs(shell) / abs(prev_shell)
            if ratio < 0.95:
                # algebraic tails give geometrically decaying shells; sum the
                # remainder once its drift-based error bound is inside tol
                remainder = shell * ratio / (1.0 - ratio)
                if prev_ratio is not None:
                    drift = abs(ratio - prev_ratio)
                    err = drift * abs(shell) / (1.0 - ratio) ** 2
                    if err <= tail_tol * max(abs(total), 1.0):
                        return float(total + remainder), False, hi
            prev_ratio = ratio
        prev_shell = shell
        lo = hi
    return float(total), True, float(radius_cap)


def dlambda_l2_norm_sq(family, lam, level=3, tail_tol=1e-10, radius_cap=2.0 ** 16):
    """Numerically integrate |D_lambda|^2 over the orbit chart.

    Torus factors carry total mass one and |D_lambda| does not depend on
    them, so only the real coordinates are integrated (shell-doubled
    Gauss-Legendre).  Hitting the radius cap before the outermost shell
    drops below `tail_tol` flags divergence.
    """
    if family.kind == QUASI_ELLIPTIC:
        return L2NormResult(1.0, False, 0.0)
    nodes, weights = np.polynomial.legendre.leggauss(16 * level)

    if family.kind == QUASI_PARABOLIC:
        f = lambda y: (1.0 + y * y / 4.0) ** (-lam)
        val, bad, r = _doubling_integral(f, 2.0, nodes, weights, tail_tol, radius_cap)
        return L2NormResult(val, bad, r)
    if family.kind == QUASI_HYPERBOLIC:
        f = lambda s: np.cosh(s) ** (-2.0 * lam)
        val, bad, r = _doubling_integral(f, 2.0, nodes, weights, tail_tol, radius_cap)
        return L2NormResult(val, bad, r)

    # nilpotent kinds: |delta|^2 = ((|b|^2+2)^2 + s^2)/4
    d = family.real_dim - 1
    diverged = []

    def s_integral(c):
        v, bad, _ = _doubling_integral(
            lambda s: (s * s + c * c) ** (-lam), c, nodes, weights,
            0.1 * tail_tol, radius_cap)
        diverged.append(bad)
        return v

    if d == 0:
        total = 4.0 ** lam * s_integral(2.0)
        return L2NormResult(total, any(diverged), 0.0)

    from scipy.special import gammaln
    surface = 2.0 * np.pi ** (d / 2) / np.exp(gammaln(d / 2))

    def radial(r):
        return np.array([rr ** (d - 1) * s_integral(rr * rr + 2.0)
                         for rr in np.atleast_1d(r)])

    val, bad, radius = _doubling_integral(radial, 2.0, nodes, weights,
                                          tail_tol, radius_cap, two_sided=False)
    total = 4.0 ** lam * surface * val
    return L2NormResult(total, bad or any(diverged), radius)
