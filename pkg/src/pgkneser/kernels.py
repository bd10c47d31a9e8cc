"""Bitset kernel selection.

Rows are implicit: the neighbourhood of vertex ``v`` is the AND over ``f`` of
``table[idx[v, f]]`` (packed little-endian uint64 words).  The compiled
extension is used when importable, unless ``PGKNESER_PURE`` is set.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if not os.environ.get("PGKNESER_PURE"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _kernels_py

first_hits = _impl.first_hits
count_hits = _impl.count_hits
or_rows = _impl.or_rows
greedy_fill = _impl.greedy_fill


def backend(name: str):
    """Module implementing the kernels for ``name`` in {"python", "cython"}."""
    if name == "python":
        return _kernels_py
    from . import _kernels

    return _kernels
