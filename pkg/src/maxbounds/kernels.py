"""Backend selection for the path kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``MAXBOUNDS_PURE_PYTHON`` is set to a non-empty value,
the numpy implementation is used.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

if os.environ.get("MAXBOUNDS_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

abs_max_rows = _impl.abs_max_rows
upcross_times = _impl.upcross_times
upcross_counts = _impl.upcross_counts
lemma3_check_rows = _impl.lemma3_check_rows
pair_moment_means = _impl.pair_moment_means


def backends():
    """Map of available backend name to module, for benchmarks and tests."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
