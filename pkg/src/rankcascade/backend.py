"""Selects the compiled kernel extension, falling back to pure NumPy.

Set ``RANKCASCADE_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("RANKCASCADE_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME

dp_tableau = _impl.dp_tableau
dp_extract = _impl.dp_extract
assortopt_steps = _impl.assortopt_steps
best_insertion = _impl.best_insertion

#: Tie tolerance used by every tie-break rule in the solvers.
TIE_TOL = 1e-12
