"""Kernel dispatch: compiled fast path with a pure-Python fallback.

The compiled module is preferred when it imported cleanly. Set
``CHATPULSE_KERNELS=pure`` (or ``native``) to force a backend at import time,
or call :func:`use_backend` to switch at runtime (the benchmark does).
"""

from __future__ import annotations

import importlib
import os

from . import _pure

_FORCED = os.environ.get("CHATPULSE_KERNELS", "").strip().lower()
if _FORCED not in ("", "pure", "native"):
    raise ImportError(
        f"CHATPULSE_KERNELS must be 'pure' or 'native', got {_FORCED!r}"
    )

_native = None
if _FORCED != "pure":
    try:
        _native = importlib.import_module("._native", __name__)
    except ImportError:
        if _FORCED == "native":
            raise


def available_backends() -> tuple[str, ...]:
    return ("pure",) if _native is None else ("pure", "native")


def backend_module(name: str):
    if name == "pure":
        return _pure
    if name == "native":
        if _native is None:
            raise ImportError("compiled kernels are not available in this install")
        return _native
    raise ValueError(f"unknown kernel backend {name!r}")


def use_backend(name: str) -> str:
    """Rebind the module-level kernel functions to the named backend."""
    global BACKEND, pair_counts, gini_sorted
    mod = backend_module(name)
    pair_counts = mod.pair_counts
    gini_sorted = mod.gini_sorted
    BACKEND = name
    return name


BACKEND = "pure" if _native is None else "native"
pair_counts = backend_module(BACKEND).pair_counts
gini_sorted = backend_module(BACKEND).gini_sorted
