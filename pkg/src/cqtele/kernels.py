"""Batch kernels, compiled when available.

Set ``CQTELE_PURE_PYTHON=1`` to force the NumPy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CQTELE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

teleport_batch = _impl.teleport_batch
measure_triplets = _impl.measure_triplets
