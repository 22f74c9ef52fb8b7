"""Backend selection for the hot loops.

The compiled extension is used when it was built; setting
``BHCLOCK_PURE_PYTHON=1`` forces the pure-Python implementation.
"""

import os

from . import _rk4_py

if os.environ.get("BHCLOCK_PURE_PYTHON", "") not in ("", "0"):
    rk4_radial = _rk4_py.rk4_radial
    BACKEND = "python"
else:
    try:
        from ._rk4 import rk4_radial
        BACKEND = "cython"
    except ImportError:
        rk4_radial = _rk4_py.rk4_radial
        BACKEND = "python"

__all__ = ["rk4_radial", "BACKEND"]
