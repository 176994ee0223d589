"""Pure-NumPy implementations of the hot kernel evaluations.

These are the reference implementations; `balltoeplitz._backend` swaps in the
compiled versions from `_fastkernels` when that extension is importable.
All powers are principal-branch.
"""

import numpy as np

BACKEND = "numpy"


def power_neg(base, lam):
    """Elementwise principal-branch base**(-lam) for complex base, real lam."""
    return np.power(base, -lam)


def kernel_vs_point(Z, wbar, lam):
    """(1 - Z @ wbar)**(-lam) for a node block Z of shape (C, n).

    `wbar` is the conjugated target point, shape (n,).
    """
    return np.power(1.0 - Z @ wbar, -lam)


def kernel_matrix(Z, Wbar, lam):
    """(1 - Z @ Wbar.T)**(-lam), shape (C, M).

    Z is a node block (C, n); Wbar holds conjugated targets (M, n).
    """
    return np.power(1.0 - Z @ Wbar.T, -lam)
