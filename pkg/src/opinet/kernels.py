"""Backend selection for the numerical kernels.

The compiled extension is used when it imports; otherwise, or when
``OPINET_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
numpy implementation is used. Both produce identical bits.
"""

import os

from . import _kernels_py

_force_py = os.environ.get("OPINET_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

simulate_f64 = _impl.simulate_f64
simulate_dd = _impl.simulate_dd
window_qr_dd = _impl.window_qr_dd
svd_solve_dd = _impl.svd_solve_dd
