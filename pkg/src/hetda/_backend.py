"""Kernel backend selection.

The compiled extension (:mod:`hetda._speedups`) is preferred when it is
importable; otherwise the pure-Python kernels are used.  The choice is
made once at import time and can be forced with the ``HETDA_BACKEND``
environment variable (``pure``, ``compiled``, or ``auto``).
"""

from __future__ import annotations

import os

from . import _pure

try:  # optional compiled extension
    from . import _speedups as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

_CHOICE = os.environ.get("HETDA_BACKEND", "auto").strip().lower()

if _CHOICE in ("", "auto"):
    _active = _compiled if _compiled is not None else _pure
elif _CHOICE == "pure":
    _active = _pure
elif _CHOICE in ("compiled", "cython", "speedups"):
    if _compiled is None:
        raise RuntimeError(
            "HETDA_BACKEND=compiled but the hetda._speedups extension is not built"
        )
    _active = _compiled
else:
    raise RuntimeError(f"unknown HETDA_BACKEND value: {_CHOICE!r}")


def active():
    """Return the kernel module selected at import time."""
    return _active


def name() -> str:
    return _active.BACKEND_NAME


def compiled_available() -> bool:
    return _compiled is not None


def get(which: str | None):
    """Resolve an explicit backend request ("pure", "compiled", or None)."""
    if which is None:
        return _active
    which = which.strip().lower()
    if which == "pure":
        return _pure
    if which in ("compiled", "cython", "speedups"):
        if _compiled is None:
            raise RuntimeError("the hetda._speedups extension is not built")
        return _compiled
    raise ValueError(f"unknown backend: {which!r}")
