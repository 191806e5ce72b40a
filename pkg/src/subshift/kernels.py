"""Backend selection for the hot loops.

The compiled extension is used when it imports cleanly; otherwise the pure
Python module takes over. Setting ``SUBSHIFT_PURE_PYTHON=1`` forces the
fallback, which the test suite uses to run both backends.
"""
import os

from . import _kernels_py

try:
    if os.environ.get("SUBSHIFT_PURE_PYTHON", "") == "1":
        raise ImportError("pure python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

_active = _compiled if _compiled is not None else _kernels_py

MODE_COUNT = _kernels_py.MODE_COUNT
MODE_ENUM = _kernels_py.MODE_ENUM
MODE_EXISTS = _kernels_py.MODE_EXISTS


def backend_name() -> str:
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def set_backend(name: str) -> None:
    """Switch the active backend (``"compiled"`` or ``"python"``)."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    _active = BACKENDS[name]


def backtrack(*args):
    return _active.backtrack(*args)


def voronoi_assign(*args):
    return _active.voronoi_assign(*args)
