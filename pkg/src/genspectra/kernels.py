"""Kernel backend selection.

The compiled extension is used when present; otherwise the numpy fallback.
Set GENSPECTRA_FORCE_PYTHON=1 to force the fallback (used by the benchmark
and the backend-parity tests).
"""

import os

from . import _kernels_py

if os.environ.get("GENSPECTRA_FORCE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
h_rhs = _kernels_py.h_rhs  # cheap helper, no compiled twin needed
h_bisect = _impl.h_bisect
f_rhs = _kernels_py.f_rhs
f_bisect_many = _impl.f_bisect_many
stieltjes_solve = _impl.stieltjes_solve


def get_backends():
    """(active backend name, names of all importable backends)."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return BACKEND, names
