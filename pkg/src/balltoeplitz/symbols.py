"""Bounded symbols on the ball, with declared invariance tags.

Evaluators are vectorized: they take a complex array of shape (..., n) and
return values of shape (...).  The noncompact families' invariant symbols are
compositions through the Cayley transform of the family's invariant
coordinates; the library below ships the generators the command line exposes.

Useful identity used throughout: with zeta = cayley(z),

    Im(zeta_n) - |zeta'|^2 = (1 - |z|^2) / |1 + z_n|^2  > 0 on B^n.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import groups


@dataclass(frozen=True)
class SymbolFn:
    """A bounded symbol: vectorized evaluator, invariance tag, sup bound."""

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    invariance: Optional[str] = None  # a Family.kind, or None
    bound: float = 1.0

    def __call__(self, Z):
        Z = np.asarray(Z, dtype=complex)
        single = Z.ndim == 1
        vals = np.asarray(self.evaluator(Z if not single else Z[None, :]),
                          dtype=complex)
        return vals[0] if single else vals

    @property
    def torus_invariant(self):
        return self.invariance == groups.QUASI_ELLIPTIC

    def is_invariant_under(self, family, **kw):
        return groups.invariance_check(self, family, **kw)


def const(c=1.0):
    c = complex(c)
    return SymbolFn(f"const({c.real:g}{c.imag:+g}j)" if c.imag else f"const({c.real:g})",
                    lambda Z: np.full(Z.shape[:-1], c), groups.QUASI_ELLIPTIC,
                    abs(c))


def modulus_sq(axis=None):
    """|z_axis|^2, or |z|^2 when axis is None; torus invariant."""
    if axis is None:
        return SymbolFn("modulus_sq",
                        lambda Z: np.sum(np.abs(Z) ** 2, axis=-1) + 0.0j,
                        groups.QUASI_ELLIPTIC, 1.0)
    return SymbolFn(f"modulus_sq[{axis}]",
                    lambda Z: np.abs(Z[..., axis]) ** 2 + 0.0j,
                    groups.QUASI_ELLIPTIC, 1.0)


def product_moduli_sq():
    """prod_j |z_j|^2; torus invariant."""
    return SymbolFn("product_moduli_sq",
                    lambda Z: np.prod(np.abs(Z) ** 2, axis=-1) + 0.0j,
                    groups.QUASI_ELLIPTIC, 1.0)


def one_minus_modulus_sq():
    return SymbolFn("one_minus_sq",
                    lambda Z: 1.0 - np.sum(np.abs(Z) ** 2, axis=-1) + 0.0j,
                    groups.QUASI_ELLIPTIC, 1.0)


def radial_exp(rate=1.0):
    """exp(-rate |z|^2); torus invariant, handy second test symbol."""
    return SymbolFn(f"radial_exp({rate:g})",
                    lambda Z: np.exp(-rate * np.sum(np.abs(Z) ** 2, axis=-1)) + 0.0j,
                    groups.QUASI_ELLIPTIC, 1.0)


def real_part(axis=0):
    """Re z_axis; deliberately not invariant (negative control)."""
    return SymbolFn(f"real_part[{axis}]",
                    lambda Z: Z[..., axis].real + 0.0j, None, 1.0)


def _siegel_height(Z):
    # (1 - |z|^2)/|1 + z_n|^2 = Im(zeta_n) - |zeta'|^2 under the Cayley map
    return ((1.0 - np.sum(np.abs(Z) ** 2, axis=-1))
            / np.abs(1.0 + Z[..., -1]) ** 2)


def siegel_height_ratio(scale=1.0):
    """u/(scale+u) with u = Im(zeta_n) - |zeta'|^2; P- and N-invariant."""
    def ev(Z):
        u = _siegel_height(Z)
        return u / (scale + u) + 0.0j
    return SymbolFn(f"height_ratio({scale:g})", ev, groups.NILPOTENT, 1.0)


def siegel_height_exp(rate=1.0):
    """exp(-rate (Im(zeta_n) - |zeta'|^2)); P- and N-invariant."""
    def ev(Z):
        return np.exp(-rate * _siegel_height(Z)) + 0.0j
    return SymbolFn(f"height_exp({rate:g})", ev, groups.NILPOTENT, 1.0)


def _cayley_parts(Z):
    denom = 1.0 + Z[..., -1]
    zp = 1j * Z[..., :-1] / denom[..., None]
    zn = 1j * (1.0 - Z[..., -1]) / denom
    return zp, zn


def hyperbolic_ratio():
    """|zeta'|^2 / Im(zeta_n) in (0,1); H-invariant (also P-invariant)."""
    def ev(Z):
        zp, zn = _cayley_parts(Z)
        return np.sum(np.abs(zp) ** 2, axis=-1) / zn.imag + 0.0j
    return SymbolFn("hyperbolic_ratio", ev, groups.QUASI_HYPERBOLIC, 1.0)


def hyperbolic_angle():
    """Re(zeta_n)/|zeta_n| in [-1,1]; H-invariant."""
    def ev(Z):
        _, zn = _cayley_parts(Z)
        return zn.real / np.abs(zn) + 0.0j
    return SymbolFn("hyperbolic_angle", ev, groups.QUASI_HYPERBOLIC, 1.0)


def nilpotent_im_tanh(axis=0, rate=1.0):
    """tanh(rate * Im zeta'_axis); N-invariant (b translates only Re zeta')."""
    def ev(Z):
        zp, _ = _cayley_parts(Z)
        return np.tanh(rate * zp[..., axis].imag) + 0.0j
    return SymbolFn(f"nilpotent_im_tanh[{axis}]", ev, groups.NILPOTENT, 1.0)


def quasi_nilpotent_height(k, scale=1.0):
    """u/(scale+u) with u = Im(zeta_n) - |zeta''|^2, zeta'' = axes k..n-2.

    Invariant under N(k,n): the torus part rotates zeta' (axes < k), the
    translations move zeta'' and shear zeta_n, leaving u fixed.
    """
    def ev(Z):
        zp, zn = _cayley_parts(Z)
        u = zn.imag - np.sum(np.abs(zp[..., k:]) ** 2, axis=-1)
        return u / (scale + u) + 0.0j
    return SymbolFn(f"qn_height(k={k})", ev, groups.QUASI_NILPOTENT, 1.0)


def quasi_nilpotent_modulus(k, axis=0, scale=1.0):
    """|zeta'_axis|^2/(scale + |zeta'_axis|^2) for a torus axis < k; N(k,n)-invariant."""
    def ev(Z):
        zp, _ = _cayley_parts(Z)
        u = np.abs(zp[..., axis]) ** 2
        return u / (scale + u) + 0.0j
    return SymbolFn(f"qn_modulus(k={k},axis={axis})", ev,
                    groups.QUASI_NILPOTENT, 1.0)


_GENERATORS = {
    "const": const,
    "modulus_sq": modulus_sq,
    "product_moduli_sq": product_moduli_sq,
    "one_minus_sq": one_minus_modulus_sq,
    "radial_exp": radial_exp,
    "real_part": real_part,
    "height_ratio": siegel_height_ratio,
    "height_exp": siegel_height_exp,
    "hyperbolic_ratio": hyperbolic_ratio,
    "hyperbolic_angle": hyperbolic_angle,
    "nilpotent_im_tanh": nilpotent_im_tanh,
    "qn_height": quasi_nilpotent_height,
    "qn_modulus": quasi_nilpotent_modulus,
}


def generator_names():
    return sorted(_GENERATORS)


def named_symbol(spec):
    """Build a symbol from a CLI spec like 'modulus_sq' or 'const:0.5'.

    Arguments after ':' are passed positionally (numbers parsed as floats,
    integer-looking ones as ints).
    """
    name, _, argstr = spec.partition(":")
    if name not in _GENERATORS:
        raise ValueError(
            f"unknown symbol {name!r}; available: {', '.join(generator_names())}")
    args = []
    for tok in filter(None, argstr.split(",")):
        val = float(tok)
        args.append(int(val) if val == int(val) and "." not in tok else val)
    return _GENERATORS[name](*args)
