"""Backend selection: compiled kernel core with pure-NumPy fallback.

Set BT_NO_EXT=1 to force the NumPy backend (used by the benchmark and by
tests that compare the two implementations).
"""

import os

from . import _kernels_np

if os.environ.get("BT_NO_EXT"):
    _impl = _kernels_np
else:
    try:
        from . import _fastkernels as _impl
    except ImportError:
        _impl = _kernels_np

BACKEND = _impl.BACKEND
power_neg = _impl.power_neg
kernel_vs_point = _impl.kernel_vs_point
kernel_matrix = _impl.kernel_matrix
