"""Kernel backend selection.

Imports the compiled extension when present, otherwise the NumPy fallback.
Set CVARLEARN_PURE_PYTHON=1 to force the fallback (used by the kernel
benchmark and the backend-equivalence tests).
"""

import os

if os.environ.get("CVARLEARN_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND

var_sorted = _impl.var_sorted
cvar_sorted = _impl.cvar_sorted
cvar_weighted = _impl.cvar_weighted
cvar_weighted_rows = _impl.cvar_weighted_rows
