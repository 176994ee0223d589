"""Fourier analysis on the orbit groups T^m x R^d.

Conventions: torus coefficients f^(alpha) = int_T f(t) conj(t^alpha) dt with
unit-mass Haar measure; real axes use (1/sqrt(2 pi)) int f(x) e^{-i xi x} dx.

Real-axis grid transforms are truncated trapezoid sums with optional
sample-based corrections: Euler-Maclaurin boundary terms plus the
integration-by-parts tail series

    int_b^inf f e^{-i xi x} dx = e^{-i xi b} sum_p f^(p)(b)/(i xi)^{p+1},

with end derivatives estimated by one-sided finite differences.  The
convolution kernels of the five families decay only polynomially along their
noncompact directions, so the corrections are what make desk-scale grids
reach the verification tolerances; pass tail_correction=False for the plain
truncated transform.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln, loggamma

from . import groups
from .errors import (OutOfSupportError, PositivityViolationError,
                     TailTruncationError)
from .groups import (NILPOTENT, QUASI_ELLIPTIC, QUASI_HYPERBOLIC,
                     QUASI_NILPOTENT, QUASI_PARABOLIC)

SQ2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Frequency:
    """A dual-group point: integer torus part, real part in chart order.

    The real part pairs with the chart's noncompact coordinates: (xi,) for
    the quasi-parabolic/hyperbolic families, (y, xi_1, ..) for the nilpotent
    kinds (y dual to s, xi dual to b).
    """

    alpha: tuple
    xi: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha",
                           tuple(int(a) for a in np.atleast_1d(self.alpha)))
        object.__setattr__(self, "xi",
                           tuple(float(x) for x in np.atleast_1d(self.xi)))


def frequency(family, alpha=(), xi=()):
    f = Frequency(tuple(np.atleast_1d(alpha)), tuple(np.atleast_1d(xi)))
    if len(f.alpha) != family.torus_dim or len(f.xi) != family.real_dim:
        raise ValueError(f"{family.label} frequencies live on Z^{family.torus_dim}"
                         f" x R^{family.real_dim}")
    return f


# ---------------------------------------------------------------------------
# the convolution kernels phi_H and their closed-form transforms

def phi_H(family, m, lam):
    """The convolution kernel of R R* on the orbit chart (phase-stripped)."""
    n = family.n
    scalar, b = groups._split_reals(family, m.reals)
    tsum = np.sum(np.exp(2j * np.pi * m.torus))
    if family.kind == QUASI_ELLIPTIC:
        return (1.0 - tsum / (2 * n)) ** (-lam)
    if family.kind == QUASI_PARABOLIC:
        base = 2.0 - 1j * scalar - (tsum / (n - 1) if n > 1 else 0.0)
        return 2.0 ** lam * base ** (-lam)
    if family.kind == QUASI_HYPERBOLIC:
        base = np.cosh(scalar) - (tsum / (2 * (n - 1)) if n > 1 else 0.0)
        return base ** (-lam) + 0.0j
    base = -1j * scalar + b @ b + 2.0
    if family.kind == QUASI_NILPOTENT:
        base = base - tsum / family.k
    return 2.0 ** lam * base ** (-lam)


def support_contains(family, freq):
    """Whether the frequency lies in the open support of phi_H_hat."""
    if any(a < 0 for a in freq.alpha):
        return False
    if family.kind in (QUASI_PARABOLIC, NILPOTENT, QUASI_NILPOTENT):
        return freq.xi[0] > 0.0
    return True


def phi_H_hat(family, freq, lam):
    """Closed form of the orbit-group Fourier transform of phi_H.

    Real and nonnegative; identically zero outside the support (alpha >= 0
    componentwise, and positive dual-s frequency where applicable).
    """
    n, k = family.n, family.k
    alpha = np.asarray(freq.alpha, dtype=int)
    if not support_contains(family, freq):
        return 0.0
    asum = int(alpha.sum())
    afact = float(gammaln(alpha + 1).sum()) if alpha.size else 0.0

    if family.kind == QUASI_ELLIPTIC:
        logv = (gammaln(lam + asum) - gammaln(lam) - afact
                - asum * math.log(2 * n))
        return float(np.exp(logv))

    if family.kind == QUASI_PARABOLIC:
        xi = freq.xi[0]
        mu = lam + asum
        logv = ((mu - 1.0) * math.log(xi) - 2.0 * xi - gammaln(lam) - afact
                - (asum * math.log(n - 1) if asum else 0.0))
        return float(SQ2PI * 2.0 ** lam * np.exp(logv))

    if family.kind == QUASI_HYPERBOLIC:
        xi = freq.xi[0]
        mu = lam + asum
        # |Gamma((mu + i xi)/2)|^2 via the complex log-gamma
        logv = (2.0 * np.real(loggamma(0.5 * (mu + 1j * xi))) - gammaln(lam)
                - afact - (asum * math.log(n - 1) if asum else 0.0)
                + (lam - 1.0) * math.log(2.0) - math.log(SQ2PI))
        return float(np.exp(logv))

    # nilpotent kinds
    y = freq.xi[0]
    xi_b = np.asarray(freq.xi[1:], dtype=float)
    d_b = family.real_dim - 1
    mu = lam + asum
    logv = ((mu - 1.0) * math.log(y) - 2.0 * y - gammaln(lam) - afact
            - 0.5 * d_b * math.log(2.0 * y)
            - float(xi_b @ xi_b) / (4.0 * y))
    if family.kind == QUASI_NILPOTENT and asum:
        logv -= asum * math.log(k)
    return float(SQ2PI * 2.0 ** lam * np.exp(logv))


def omega_H_hat(family, freq, lam):
    """sqrt(phi_H_hat): the transform of the convolution square root."""
    v = phi_H_hat(family, freq, lam)
    if v < -1e-12:
        raise PositivityViolationError(
            f"phi_H_hat({freq}) = {v} < 0 for {family.label}")
    return math.sqrt(max(v, 0.0))


# ---------------------------------------------------------------------------
# grids and transforms

@dataclass(frozen=True)
class RealAxis:
    """Uniform grid x_g = -L + g h, g = 0..N-1, h = 2L/N (N a power of two)."""

    half_width: float
    points: int

    def __post_init__(self):
        if self.points & (self.points - 1):
            raise ValueError("grid sizes must be powers of two")

    @property
    def h(self):
        return 2.0 * self.half_width / self.points

    def grid(self):
        return -self.half_width + self.h * np.arange(self.points)


def _fornberg(x, x0, max_order):
    """Finite-difference weights (max_order+1, len(x)) at x0 on nodes x."""
    n = len(x)
    c = np.zeros((max_order + 1, n))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, max_order)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for s in range(mn, 0, -1):
                    c[s, i] = c1 * (s * c[s - 1, i - 1] - c5 * c[s, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for s in range(mn, 0, -1):
                c[s, j] = (c4 * c[s, j] - s * c[s - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


_IBP_TERMS = 3
_FD_STENCIL = 12
_IBP_MIN_PHASE = 8.0  # require |xi| * half-width above this before using tails


@lru_cache(maxsize=64)
def _end_derivative_weights(h, stencil, max_order):
    offsets = h * np.arange(stencil)
    left = _fornberg(offsets, 0.0, max_order)            # derivatives at x_0
    right = _fornberg(-offsets[::-1], 0.0, max_order)    # derivatives at x_{N-1}
    return left, right


def real_axis_weights(axis, xis, tail_correction=True):
    """Dense weight matrix W with (values @ W.T)[k] ~ transform at xis[k].

    Folds the trapezoid rule, Euler-Maclaurin boundary terms and the
    integration-by-parts tail series into per-sample weights, so applying the
    corrected transform to a multi-axis array is a single tensor contraction.
    """
    x = axis.grid()
    h, N = axis.h, axis.points
    xis = np.asarray(xis, dtype=float)
    W = h * np.exp(-1j * np.outer(xis, x))
    W[:, 0] *= 0.5
    W[:, -1] *= 0.5
    if not tail_correction:
        return W / SQ2PI

    left, right = _end_derivative_weights(h, _FD_STENCIL, _IBP_TERMS)
    a, b = x[0], x[-1]
    ea = np.exp(-1j * xis * a)
    eb = np.exp(-1j * xis * b)

    # Euler-Maclaurin: + (h^2/12)(g'(a) - g'(b)) - (h^4/720)(g'''(a) - g'''(b))
    # with g = f e^{-i xi x}; expand g-derivatives in f-derivatives.
    for sign, e, sl, fd in ((+1.0, ea, slice(0, _FD_STENCIL), left),
                            (-1.0, eb, slice(N - _FD_STENCIL, N), right)):
        ix = -1j * xis
        g1 = np.outer(e, fd[1]) + ix[:, None] * np.outer(e, fd[0])
        g3 = (np.outer(e, fd[3]) + 3 * ix[:, None] * np.outer(e, fd[2])
              + 3 * (ix ** 2)[:, None] * np.outer(e, fd[1])
              + (ix ** 3)[:, None] * np.outer(e, fd[0]))
        W[:, sl] += sign * ((h * h / 12.0) * g1 - (h ** 4 / 720.0) * g3)

    # IBP tails: -e^{-i xi a} sum_p f^(p)(a)/(i xi)^{p+1}  (left)
    #            +e^{-i xi b} sum_p f^(p)(b)/(i xi)^{p+1}  (right)
    use = np.abs(xis) * axis.half_width >= _IBP_MIN_PHASE
    if np.any(use):
        inv = np.zeros_like(xis, dtype=complex)
        inv[use] = 1.0 / (1j * xis[use])
        powers = np.array([inv ** (p + 1) for p in range(_IBP_TERMS + 1)])
        for sign, e, sl, fd in ((-1.0, ea, slice(0, _FD_STENCIL), left),
                                (+1.0, eb, slice(N - _FD_STENCIL, N), right)):
            tail = np.zeros((len(xis), _FD_STENCIL), dtype=complex)
            for p in range(_IBP_TERMS + 1):
                tail += powers[p][:, None] * fd[p][None, :]
            W[:, sl] += sign * use[:, None] * e[:, None] * tail
    return W / SQ2PI


@dataclass
class OrbitFunction:
    """Samples of a function on the orbit chart T^m x R^d.

    `samples` has the torus axes first (uniform angular grids of power-of-two
    size) followed by one axis per RealAxis.  `tail_tol` is the declared
    decay bound on the outermost real-axis shell, checked at transform time.
    """

    family: groups.Family
    torus_points: int
    real_axes: tuple
    samples: np.ndarray
    tail_tol: float = 1e-3

    @classmethod
    def from_callable(cls, family, fn, torus_points=64, real_axes=(),
                      tail_tol=1e-3):
        """Sample fn(torus_angles..., reals...) on the tensor grid.

        `fn` must broadcast: it receives one array per chart coordinate,
        shaped to broadcast over the full grid.
        """
        real_axes = tuple(real_axes)
        if len(real_axes) != family.real_dim:
            raise ValueError(f"need {family.real_dim} real axes")
        m = family.torus_dim
        shapes = []
        args = []
        total = m + len(real_axes)
        for i in range(m):
            g = np.arange(torus_points) / torus_points
            args.append(g.reshape((-1,) + (1,) * (total - 1 - i)))
        for i, ax in enumerate(real_axes):
            args.append(ax.grid().reshape((-1,) + (1,) * (total - 1 - m - i)))
        vals = np.asarray(fn(*args), dtype=complex)
        want = tuple([torus_points] * m + [ax.points for ax in real_axes])
        vals = np.broadcast_to(vals, want).copy()
        return cls(family, torus_points, real_axes, vals, tail_tol)

    def boundary_magnitude(self):
        """Max |sample| on the outermost shell of the real-axis box."""
        if not self.real_axes:
            return 0.0
        m = self.family.torus_dim
        worst = 0.0
        for i in range(len(self.real_axes)):
            sl = [slice(None)] * self.samples.ndim
            for edge in (0, -1):
                sl[m + i] = edge
                worst = max(worst, float(np.max(np.abs(self.samples[tuple(sl)]))))
        return worst


def group_fourier(f, freqs, tail_correction=True):
    """Transform an OrbitFunction at the requested Frequency list.

    Exact FFT along torus axes; corrected (or plain) trapezoid transforms
    along real axes.  Raises TailTruncationError when the declared decay
    bound is violated on the sampling box boundary.
    """
    boundary = f.boundary_magnitude()
    if boundary > f.tail_tol:
        raise TailTruncationError("orbit samples do not decay on the grid box",
                                  boundary)
    m = f.family.torus_dim
    freqs = list(freqs)
    coeff = np.fft.fftn(f.samples, axes=tuple(range(m))) if m else f.samples
    if m:
        coeff = coeff / f.torus_points ** m

    # group identical real parts to share axis contractions
    out = np.empty(len(freqs), dtype=complex)
    xi_lists = [np.array(sorted({fr.xi[i] for fr in freqs}))
                for i in range(len(f.real_axes))]
    mats = [real_axis_weights(ax, xs, tail_correction)
            for ax, xs in zip(f.real_axes, xi_lists)]
    for i, fr in enumerate(freqs):
        if len(fr.alpha) != m or len(fr.xi) != len(f.real_axes):
            raise ValueError("frequency shape does not match the chart")
        if m:
            if any(abs(a) >= f.torus_points // 2 for a in fr.alpha):
                raise ValueError("torus frequency beyond the grid band limit")
            slab = coeff[tuple(np.mod(a, f.torus_points) for a in fr.alpha)]
        else:
            slab = coeff
        for axn in range(len(f.real_axes)):
            k = int(np.searchsorted(xi_lists[axn], fr.xi[axn]))
            slab = np.tensordot(mats[axn][k], slab, axes=(0, 0))
        out[i] = slab
    return out


def bspace_support_check(f, family, lam, tol=1e-8, freqs=None,
                         tail_correction=True):
    """True iff the transform vanishes (to tol) off the support of phi_H_hat."""
    if freqs is None:
        freqs = off_support_battery(family)
    vals = group_fourier(f, freqs, tail_correction)
    return bool(np.all(np.abs(vals) <= tol))


def off_support_battery(family):
    """Default off-support frequencies used by the membership check."""
    m, d = family.torus_dim, family.real_dim
    freqs = []
    for i in range(m):
        for a in (-1, -2):
            alpha = [0] * m
            alpha[i] = a
            freqs.append(Frequency(tuple(alpha), (0.5,) * d))
    if family.kind in (QUASI_PARABOLIC, NILPOTENT, QUASI_NILPOTENT):
        for v in (-0.5, -1.5, -3.0):
            freqs.append(Frequency((0,) * m, (v,) + (0.0,) * (d - 1)))
    return freqs


# ---------------------------------------------------------------------------
# closed-form verification engines

def _phi_grid_closure(family, lam):
    """phi_H as a broadcastable function of (torus angles..., reals...)."""
    n, k = family.n, family.k

    def tsum(targs):
        return sum(np.exp(2j * np.pi * a) for a in targs) if targs else 0.0

    if family.kind == QUASI_ELLIPTIC:
        return lambda *ax: (1.0 - tsum(ax) / (2 * n)) ** (-lam)
    if family.kind == QUASI_PARABOLIC:
        def f(*ax):
            t, y = ax[:-1], ax[-1]
            return 2.0 ** lam * (2.0 - 1j * y
                                 - (tsum(t) / (n - 1) if n > 1 else 0.0)) ** (-lam)
        return f
    if family.kind == QUASI_HYPERBOLIC:
        def f(*ax):
            t, s = ax[:-1], ax[-1]
            return (np.cosh(s) - (tsum(t) / (2 * (n - 1)) if n > 1 else 0.0)) ** (-lam)
        return f
    if family.kind == NILPOTENT:
        def f(*ax):
            s, bs = ax[0], ax[1:]
            bsq = sum(b * b for b in bs) if bs else 0.0
            return 2.0 ** lam * (-1j * s + bsq + 2.0) ** (-lam)
        return f

    def f(*ax):
        t, s, bs = ax[:k], ax[k], ax[k + 1:]
        bsq = sum(b * b for b in bs) if bs else 0.0
        return 2.0 ** lam * (-1j * s + bsq + 2.0 - tsum(t) / k) ** (-lam)
    return f


def default_axes(family, lam):
    """Grid defaults for the closed-form verification at desk scale."""
    if family.kind == QUASI_PARABOLIC:
        return (RealAxis(128.0, 8192),)
    if family.kind == QUASI_HYPERBOLIC:
        return (RealAxis(24.0, 2048),)
    if family.kind in (NILPOTENT, QUASI_NILPOTENT):
        d_b = family.real_dim - 1
        return (RealAxis(128.0, 8192),) + (RealAxis(16.0, 1024),) * d_b
    return ()


def phi_orbit_function(family, lam, torus_points=64, real_axes=None,
                       tail_tol=1e-3):
    """phi_H sampled on a default (or explicit) orbit grid."""
    axes = default_axes(family, lam) if real_axes is None else tuple(real_axes)
    return OrbitFunction.from_callable(family, _phi_grid_closure(family, lam),
                                       torus_points, axes, tail_tol)


def _alpha_box(family, alpha_max, include_negative=True):
    m = family.torus_dim
    if m == 0:
        return [()]
    lo = -2 if include_negative else 0
    grids = np.meshgrid(*([np.arange(lo, alpha_max + 1)] * m), indexing="ij")
    combos = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.abs(combos).sum(axis=1) <= alpha_max
    return [tuple(int(v) for v in row) for row in combos[keep]]


def _xi_box(family, xi_max, xi_step):
    d = family.real_dim
    if d == 0:
        return [()]
    vals = np.arange(-xi_max, xi_max + xi_step / 2, xi_step)
    vals = vals[np.abs(vals) > 1e-12]
    if d == 1:
        return [(float(v),) for v in vals]
    # first axis is the dual-s frequency; keep a light cross grid in b-duals
    cross = np.array([-2.0, -0.75, 0.0, 0.75, 2.0])
    out = []
    for v in vals:
        for c in cross:
            out.append((float(v),) + (float(c),) * (d - 1))
    return out


def closed_form_check(family, lam, alpha_max=8, xi_max=6.0, xi_step=0.5,
                      torus_points=64, real_axes=None, chunk=32):
    """Compare phi_H_hat closed forms against the numerical grid transform.

    Returns a dict with the normalized on-support error (absolute error over
    the max of |phi_H_hat| on the tested support set) and the absolute
    off-support error.  Streams over the trailing real axis so the
    quasi-nilpotent family at n=3 stays within memory.
    """
    axes = default_axes(family, lam) if real_axes is None else tuple(real_axes)
    m, d = family.torus_dim, family.real_dim
    alphas = _alpha_box(family, alpha_max)
    xis = _xi_box(family, xi_max, xi_step)
    phi_fn = _phi_grid_closure(family, lam)

    a_idx = {a: i for i, a in enumerate(alphas)}
    xi_cols = [np.array(sorted({x[i] for x in xis})) for i in range(d)]
    mats = [real_axis_weights(ax, xc, True) for ax, xc in zip(axes, xi_cols)]

    # numeric[alpha, xi_1, ..., xi_d]
    if d == 0:
        vals = OrbitFunction.from_callable(family, phi_fn, torus_points, ())
        coeff = np.fft.fftn(vals.samples) / torus_points ** m
        numeric = np.array([coeff[tuple(np.mod(a, torus_points) for a in al)]
                            for al in alphas])
    elif d == 1 or m == 0:
        f = OrbitFunction.from_callable(family, phi_fn, torus_points, axes)
        coeff = (np.fft.fftn(f.samples, axes=tuple(range(m)))
                 / torus_points ** m if m else f.samples)
        slabs = np.array([coeff[tuple(np.mod(a, torus_points) for a in al)]
                          for al in alphas])
        numeric = np.tensordot(slabs, mats[0], axes=(1, 1))
        for axn in range(1, d):
            numeric = np.tensordot(numeric, mats[axn], axes=(1, 1))
    else:
        # stream over the trailing b axis (quasi-nilpotent at n = 3)
        bax = axes[-1]
        bgrid = bax.grid()
        acc = np.zeros((len(alphas), len(xi_cols[0]), bax.points), dtype=complex)
        sgrid = axes[0].grid()
        tgrid = np.arange(torus_points) / torus_points
        for start in range(0, bax.points, chunk):
            stop = min(start + chunk, bax.points)
            targs = [tgrid.reshape((-1,) + (1,) * (2 + m - 1 - i))
                     for i in range(m)]
            sarg = sgrid.reshape((-1, 1))
            barg = bgrid[start:stop].reshape((1, -1))
            vals = phi_fn(*targs, sarg, barg)
            vals = np.broadcast_to(
                vals, (torus_points,) * m + (axes[0].points, stop - start))
            coeff = np.fft.fftn(vals, axes=tuple(range(m))) / torus_points ** m
            slabs = np.stack([coeff[tuple(np.mod(a, torus_points) for a in al)]
                              for al in alphas])
            acc[:, :, start:stop] = np.tensordot(slabs, mats[0], axes=(1, 1)
                                                 ).transpose(0, 2, 1)
        numeric = np.tensordot(acc, mats[1], axes=(2, 1))

    on_err = off_err = 0.0
    scale = 0.0
    for a in alphas:
        for x in xis:
            fr = Frequency(a, x)
            closed = phi_H_hat(family, fr, lam)
            if support_contains(family, fr):
                scale = max(scale, abs(closed))
    for a in alphas:
        ia = a_idx[a]
        for x in xis:
            fr = Frequency(a, x)
            closed = phi_H_hat(family, fr, lam)
            pos = (ia,) + tuple(int(np.searchsorted(xi_cols[i], x[i]))
                                for i in range(d))
            num = complex(numeric[pos])
            err = abs(num - closed)
            if support_contains(family, fr):
                on_err = max(on_err, err)
            else:
                off_err = max(off_err, err)
    return {"family": family.label, "lam": lam,
            "on_support_error": on_err / max(scale, 1e-300),
            "off_support_error": off_err,
            "scale": scale, "n_frequencies": len(alphas) * len(xis)}
