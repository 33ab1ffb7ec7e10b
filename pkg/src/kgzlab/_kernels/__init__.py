"""Stepping-kernel backend selection.

The compiled extension is preferred; the numpy fallback is arithmetic-identical.
Set KGZLAB_KERNELS=py to force the fallback (used by the benchmark and tests).
"""

import os

from . import _ref

BACKEND = "py"
second_diff_odd = _ref.second_diff_odd
leapfrog_step = _ref.leapfrog_step

if os.environ.get("KGZLAB_KERNELS", "").lower() not in ("py", "python", "ref"):
    try:
        from . import _core

        BACKEND = "c"
        second_diff_odd = _core.second_diff_odd
        leapfrog_step = _core.leapfrog_step
    except ImportError:
        pass
