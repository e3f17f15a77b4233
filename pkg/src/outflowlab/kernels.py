"""Backend selection for the transient hot loop.

The compiled extension is used when it was built; otherwise, or when
``OUTFLOWLAB_PURE_PYTHON=1`` is set, the numpy implementation is used.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("OUTFLOWLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

rhs = _impl.rhs
max_rate = _impl.max_rate


def get(backend):
    """Kernel module by name (``"python"`` or ``"cython"``)."""
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {backend!r}")
