"""Weighted Bergman spaces on B^n: measure, kernel, quadrature, Toeplitz matrices.

The probability measure is d mu_lambda = c_lambda (1-|z|^2)^{lambda-n-1} dv
with c_lambda = Gamma(lambda)/(n! Gamma(lambda-n)), lambda > n.  Quadrature
uses tensor polar coordinates z_j = r_j exp(2 pi i theta_j): the radial block
{sum r_j^2 < 1} is mapped to a cube and integrated with per-axis Gauss-Jacobi
rules carrying the exact boundary-weight exponents (so monomial moments are
integrated exactly); angles use the uniform trapezoid rule, exact on
trigonometric polynomials below the grid's band limit.  Node evaluation is
chunked; reductions run in a fixed order, so results are reproducible.

Supported dimensions: n <= 3 (cost grows as the full tensor grid).
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln, roots_jacobi

from . import groups, symbols
from ._backend import kernel_vs_point
from .errors import QuadratureConfigError
from .geometry import _as_coords

MAX_DIM = 3


@dataclass(frozen=True)
class BergmanParams:
    """The pair (n, lambda) fixing the space; requires lambda > n."""

    n: int
    lam: float

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise ValueError(f"n must be in 1..{MAX_DIM}")
        if not self.lam > self.n:
            raise ValueError(f"weight must exceed n (got lambda={self.lam}, n={self.n})")

    @property
    def c_lambda(self):
        """Normalization making mu_lambda a probability measure."""
        return float(np.exp(gammaln(self.lam) - gammaln(self.lam - self.n))
                     / math.factorial(self.n))


def graded_lex_indices(n, degree):
    """All multi-indices with |alpha| <= degree, graded lexicographic order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for a in range(remaining, -1, -1):
            rec(prefix + (a,), remaining - a, slots - 1)

    for total in range(degree + 1):
        rec((), total, n)
    return out


def monomial_norm_sq(params, alpha):
    """||z^alpha||^2 = alpha! Gamma(lambda)/Gamma(lambda+|alpha|), log-domain."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=int))
    total = alpha.sum(axis=1)
    logv = (gammaln(alpha + 1).sum(axis=1) + gammaln(params.lam)
            - gammaln(params.lam + total))
    out = np.exp(logv)
    return float(out[0]) if out.shape == (1,) else out


def kernel(params, z, w):
    """Reproducing kernel K(z, w) = (1 - <z, w>)**(-lambda), principal branch."""
    zc, wc = _as_coords(z, params.n), _as_coords(w, params.n)
    return complex(kernel_vs_point(zc[None, :], wc.conj(), params.lam)[0])


def kernel_expansion(params, z, w, degree):
    """Truncated expansion sum_{|a|<=D} z^a conj(w)^a / ||z^a||^2 (test aid)."""
    zc, wc = _as_coords(z, params.n), _as_coords(w, params.n)
    idx = np.array(graded_lex_indices(params.n, degree))
    terms = (np.prod(zc[None, :] ** idx, axis=1)
             * np.prod(wc.conj()[None, :] ** idx, axis=1))
    return complex(np.sum(terms / monomial_norm_sq(params, idx)))


# ---------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True)
class QuadSpec:
    """Radial nodes and angular grid sizes per axis (ints broadcast)."""

    radial: Union[int, Sequence[int]]
    angular: Union[int, Sequence[int]]

    def resolve(self, n):
        rad = np.broadcast_to(np.asarray(self.radial, dtype=int), (n,)).copy()
        ang = np.broadcast_to(np.asarray(self.angular, dtype=int), (n,)).copy()
        if np.any(rad < 2) or np.any(ang < 4):
            raise QuadratureConfigError("radial >= 2 and angular >= 4 required")
        return tuple(rad), tuple(ang)


_LEVELS = {1: range(1, 9), 2: range(1, 7), 3: range(1, 5)}


def resolve_level(params, level):
    """Map an integer level to a QuadSpec (or pass a QuadSpec through)."""
    if isinstance(level, QuadSpec):
        return level
    n = params.n
    if level not in _LEVELS[n]:
        raise QuadratureConfigError(
            f"level {level} outside supported range {list(_LEVELS[n])} for n={n}")
    if n == 1:
        return QuadSpec(8 * level, 2 ** (5 + level))
    if n == 2:
        return QuadSpec(8 * level, 2 ** (3 + level))
    return QuadSpec(4 + 4 * level, 2 ** (2 + level))


class BallRule:
    """Tensor polar quadrature rule for mu_lambda on B^n.

    Exposes the radial rows (radii + weights summing to one) and the flat
    angular grid; `iter_blocks` yields (nodes, weights) chunks in a fixed
    deterministic order.
    """

    def __init__(self, params, spec):
        self.params = params
        n, lam = params.n, params.lam
        radial, angular = spec.resolve(n)
        self.radial_counts, self.angular_shape = radial, angular

        axes_nodes, axes_weights = [], []
        for j in range(1, n + 1):
            a = lam - 1.0 - j
            x, w = roots_jacobi(radial[j - 1], a, 0.0)
            axes_nodes.append((x + 1.0) / 2.0)
            axes_weights.append(w * 2.0 ** (-a - 1.0))
        const = params.c_lambda * math.factorial(n)

        # Dirichlet map: u_1 = v_1, u_j = v_j prod_{i<j}(1-v_i)
        grids = np.meshgrid(*axes_nodes, indexing="ij")
        wgrids = np.meshgrid(*axes_weights, indexing="ij")
        V = np.stack([g.ravel() for g in grids], axis=1)
        W = const * np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        U = np.empty_like(V)
        carry = np.ones(len(V))
        for j in range(n):
            U[:, j] = V[:, j] * carry
            carry = carry * (1.0 - V[:, j])
        self.radial_sq = U                    # r_j^2 per row
        self.radii = np.sqrt(U)               # (R, n)
        self.radial_weights = W               # (R,), sums to 1

        phases = [np.exp(2j * np.pi * np.arange(N) / N) for N in angular]
        mesh = np.meshgrid(*phases, indexing="ij")
        self.angular_flat = np.stack([m.ravel() for m in mesh], axis=1)  # (A, n)
        self.angular_count = self.angular_flat.shape[0]

    @property
    def node_count(self):
        return len(self.radii) * self.angular_count

    def nodes_for_row(self, i):
        return self.radii[i][None, :] * self.angular_flat

    def iter_blocks(self, rows_per_block=None):
        """Yield (Z, w) chunks; w includes the angular mean factor."""
        A = self.angular_count
        if rows_per_block is None:
            rows_per_block = max(1, (1 << 20) // A)
        R = len(self.radii)
        for start in range(0, R, rows_per_block):
            stop = min(start + rows_per_block, R)
            Z = (self.radii[start:stop, None, :]
                 * self.angular_flat[None, :, :]).reshape(-1, self.params.n)
            w = np.repeat(self.radial_weights[start:stop] / A, A)
            yield Z, w


def ball_rule(params, level=3):
    return BallRule(params, resolve_level(params, level))


def ball_quadrature(params, integrand, level=3, rule=None):
    """Approximate int f d mu_lambda; `integrand` maps (C, n) blocks to (C,)."""
    rule = ball_rule(params, level) if rule is None else rule
    parts = [np.sum(np.asarray(integrand(Z)) * w) for Z, w in rule.iter_blocks()]
    return complex(np.sum(np.array(parts)))


# ---------------------------------------------------------------------------
# polynomials

@dataclass(frozen=True)
class Polynomial:
    """sum_m coeffs[m] * z**exponents[m], exponents shape (M, n)."""

    exponents: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "exponents",
                           np.atleast_2d(np.asarray(self.exponents, dtype=int)))
        object.__setattr__(self, "coeffs",
                           np.asarray(self.coeffs, dtype=complex).reshape(-1))

    @property
    def n(self):
        return self.exponents.shape[1]

    @property
    def degree(self):
        return int(self.exponents.sum(axis=1).max())

    def __call__(self, Z):
        Z = np.asarray(Z, dtype=complex)
        single = Z.ndim == 1
        Zb = Z[None, :] if single else Z
        vals = np.zeros(Zb.shape[:-1], dtype=complex)
        for e, c in zip(self.exponents, self.coeffs):
            vals += c * np.prod(Zb ** e, axis=-1)
        return vals[0] if single else vals

    @classmethod
    def random(cls, n, degree, rng, scale=1.0):
        idx = np.array(graded_lex_indices(n, degree))
        c = scale * (rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx)))
        return cls(idx, c)


def reproducing_check(params, p, w, level=3):
    """|<p, K_w> - p(w)| with the inner product taken by quadrature."""
    wc = _as_coords(w, params.n)
    lam = params.lam

    def integrand(Z):
        # p(z) * conj(K_w(z)) = p(z) * (1 - <w, z>)**(-lam)
        return p(Z) * kernel_vs_point(Z.conj(), wc, lam)

    approx = ball_quadrature(params, integrand, level)
    return abs(approx - p(wc))


# ---------------------------------------------------------------------------
# Toeplitz matrices

@dataclass(frozen=True)
class ToeplitzMatrix:
    """Truncated matrix of T_phi in the normalized monomial basis."""

    params: BergmanParams
    degree: int
    indices: tuple
    entries: np.ndarray

    def index_of(self, alpha):
        return self.indices.index(tuple(alpha))

    def diagonal(self):
        return np.real(np.diag(self.entries)).copy()

    def operator_norm(self):
        return float(np.linalg.norm(self.entries, 2))


def _angular_coefficients(vals_grid, shape):
    """Full DFT coefficient array: c[f] = mean_a vals[a] e^{-2 pi i f.a/N}."""
    return np.fft.fftn(vals_grid.reshape(shape)) / np.prod(shape)


def toeplitz_matrix(params, phi, degree, level=3, rule=None):
    """Entries <phi e_alpha, e_beta> over the graded-lex basis |alpha| <= D.

    For symbols tagged torus-invariant the off-diagonal entries vanish
    analytically and are pinned to exact zeros.
    """
    rule = ball_rule(params, level) if rule is None else rule
    idx = graded_lex_indices(params.n, degree)
    idx_arr = np.array(idx)
    B = len(idx)
    norms = np.sqrt(monomial_norm_sq(params, idx_arr))
    if isinstance(norms, float):
        norms = np.array([norms])
    shape = rule.angular_shape
    if any(N <= 2 * degree for N in shape):
        raise QuadratureConfigError(
            f"angular grid {shape} cannot separate frequencies up to 2*{degree}")

    torus_inv = getattr(phi, "torus_invariant", False)
    rad_pows = np.prod(rule.radii[:, None, :] ** idx_arr[None, :, :], axis=2)

    if torus_inv:
        diag = np.zeros(B, dtype=complex)
        for i in range(len(rule.radii)):
            mean = complex(np.mean(phi(rule.nodes_for_row(i))))
            diag += rule.radial_weights[i] * mean * rad_pows[i] ** 2
        entries = np.diag(diag / monomial_norm_sq(params, idx_arr))
        return ToeplitzMatrix(params, degree, tuple(idx), entries)

    # entry (i, j) pairs the angular mean of phi against e^{2 pi i (a_j - a_i).theta},
    # which is the forward-DFT coefficient at frequency a_i - a_j
    diff = idx_arr[:, None, :] - idx_arr[None, :, :]
    flat_keys = np.zeros((B, B), dtype=int)
    for ax, N in enumerate(shape):
        flat_keys = flat_keys * N + np.mod(diff[..., ax], N)

    entries = np.zeros((B, B), dtype=complex)
    for i in range(len(rule.radii)):
        vals = phi(rule.nodes_for_row(i))
        coeff = _angular_coefficients(vals, shape).ravel()[flat_keys]
        entries += rule.radial_weights[i] * (rad_pows[i][:, None]
                                             * rad_pows[i][None, :]) * coeff
    entries /= norms[:, None] * norms[None, :]
    return ToeplitzMatrix(params, degree, tuple(idx), entries)


def symbol_pullback(g, phi):
    """The translated symbol z -> phi(g^{-1} . z); invariance tag cleared."""
    from .geometry import GroupElement, mobius_action_many
    if not isinstance(g, GroupElement):
        g = GroupElement(np.asarray(g, dtype=complex))
    ginv = g.inverse().matrix

    def ev(Z):
        return phi(mobius_action_many(ginv, np.asarray(Z, dtype=complex)))

    return symbols.SymbolFn(f"pullback({phi.name})", ev, None, phi.bound)


def invariance_check(phi, family, samples=200, rng=None, tol=1e-9):
    """True iff phi is invariant under sampled family elements (see groups)."""
    return groups.invariance_check(phi, family, samples=samples, rng=rng, tol=tol)
