"""Kernel backend selection.

The compiled extension (``irkit._ckernels``) is used when it was built and
importable; otherwise the NumPy fallback takes over transparently. Both
produce bit-identical results. Set ``IRKIT_BACKEND=python`` to force the
fallback (e.g. for the benchmark or when debugging), ``=cython`` to require
the extension.
"""

from __future__ import annotations

import os

from irkit import _pykernels

_requested = os.environ.get("IRKIT_BACKEND", "auto").lower()

if _requested not in ("auto", "python", "cython"):
    raise ValueError(f"IRKIT_BACKEND must be auto, python or cython, not {_requested!r}")

if _requested == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from irkit import _ckernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "IRKIT_BACKEND=cython but the compiled extension is not available; "
                "reinstall with `pip install -e .` (requires Cython and a C compiler)"
            ) from None
        _impl = _pykernels
        BACKEND = "python"

slic_assign = _impl.slic_assign
slic_update = _impl.slic_update
split_scan_gini = _impl.split_scan_gini
split_scan_mse = _impl.split_scan_mse
