"""Kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-Python twin.
Set SWIPTLQG_PURE_PYTHON=1 to force the fallback (used by the benchmark and
the parity tests).
"""

import os

if os.environ.get("SWIPTLQG_PURE_PYTHON"):
    from . import _kernels_py as kernels

    HAVE_COMPILED = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        from . import _kernels_py as kernels

        HAVE_COMPILED = False

STATUS_MAXITER = 0
STATUS_CONVERGED = 1
STATUS_DIVERGED = 2
STATUS_SINGULAR = -1
