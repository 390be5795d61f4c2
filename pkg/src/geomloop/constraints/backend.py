"""Selects the residual/gradient kernel at import time.

The compiled Cython kernel is preferred; the pure numpy/Python kernel is the
fallback. Set GEOMLOOP_PURE=1 to force the fallback (used by the benchmark
and by tests that compare the two).
"""

from __future__ import annotations

import os

from . import kernel_py

if os.environ.get("GEOMLOOP_PURE"):
    _impl = kernel_py
    BACKEND_NAME = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND_NAME = "compiled"
    except ImportError:
        _impl = kernel_py
        BACKEND_NAME = "python"

residuals = _impl.residuals
energy_gradient = _impl.energy_gradient
