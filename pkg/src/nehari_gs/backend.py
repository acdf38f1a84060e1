"""Kernel backend selection.

The compiled extension is preferred when it imports; otherwise the numpy
reference kernels are used.  Set NEHARI_GS_BACKEND=python or =compiled to
force a choice (forcing "compiled" raises if the extension is missing, so
benchmarks cannot silently fall back).
"""

import os

from . import _kernels_py

_forced = os.environ.get("NEHARI_GS_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced == "compiled":
    from . import _fastkernels as _impl  # noqa: F401
else:
    try:
        from . import _fastkernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

fiber_scan = _impl.fiber_scan
quad_form_parts = _impl.quad_form_parts
weighted_dot = _impl.weighted_dot


def backend_name() -> str:
    """Which kernel implementation is active ("compiled" or "python")."""
    return _impl.BACKEND_NAME
