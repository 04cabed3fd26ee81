"""Kernel compilation switch.

Hot loops in :mod:`mapforge._kernels` are written as plain Python over numpy
arrays.  When numba is importable they are compiled with ``@njit``; setting the
environment variable ``MAPFORGE_NUMBA=0`` (read once at import time) keeps the
uncompiled functions, so the exact same source runs under CPython.  The two
paths are checked against each other in the test-suite and timed against each
other in ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os
from typing import Callable, TypeVar

F = TypeVar("F", bound=Callable)

_FLAG = os.environ.get("MAPFORGE_NUMBA", "1").strip().lower()

try:  # pragma: no cover - exercised implicitly by the environment
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

NUMBA_ENABLED: bool = _numba is not None and _FLAG not in {"0", "false", "no", "off"}


def kernel(fn: F) -> F:
    """Compile ``fn`` in nopython mode, or return it untouched on the fallback path."""
    if NUMBA_ENABLED:
        return _numba.njit(cache=True, nogil=True)(fn)  # type: ignore[union-attr]
    return fn


def python_impl(fn: Callable) -> Callable:
    """Return the interpreted version of a kernel (``py_func`` when compiled)."""
    return getattr(fn, "py_func", fn)
