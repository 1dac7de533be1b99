"""Kernel backend dispatch.

The compiled extension (``lagrelax._core``) is preferred when importable;
otherwise the numpy fallback (``lagrelax._core_py``) is used. Setting the
environment variable ``LAGRELAX_PURE_PYTHON=1`` before import forces the
fallback regardless.
"""

import os

if os.environ.get("LAGRELAX_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _core_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _core_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

sga_stream = _impl.sga_stream
erm_ascent = _impl.erm_ascent
greedy_packing = _impl.greedy_packing


def backend_name() -> str:
    """Which kernel implementation this process is running ("cython" or "python")."""
    return BACKEND
