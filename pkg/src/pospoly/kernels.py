"""Backend selection for the basis evaluation kernels.

The compiled extension is preferred; the pure-numpy fallback is used when
the extension is missing or when POSPOLY_PURE_PYTHON is set. Both backends
produce bit-identical output (same recurrence, same operation order per
entry), so callers never need to care which one is active.
"""
import os

from . import _kernels_py

if os.environ.get("POSPOLY_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _fastkernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

legendre_table = _impl.legendre_table
vandermonde_from_tables = _impl.vandermonde_from_tables
