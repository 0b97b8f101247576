"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``FO2T_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _search_py

_compiled = None
if os.environ.get("FO2T_PURE_PYTHON") != "1":
    try:
        from . import _search_cy as _compiled
    except ImportError:
        _compiled = None

KERNEL = "compiled" if _compiled is not None else "python"


def available() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get_kernel(name: str | None = None):
    """Search function for ``name`` in {None, 'auto', 'compiled', 'python'}."""
    if name in (None, "auto"):
        return _compiled.search if _compiled is not None else _search_py.search
    if name == "python":
        return _search_py.search
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel not built; reinstall with Cython available")
        return _compiled.search
    raise ValueError(f"unknown kernel {name!r}")
