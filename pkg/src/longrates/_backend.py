"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
used otherwise. Set LONGRATES_BACKEND=python or =cython to force a choice
(forcing cython raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("LONGRATES_BACKEND", "").strip().lower()

if _choice == "python":
    _impl = _kernels_py
    BACKEND = "python"
elif _choice == "cython":
    from . import _kernels as _impl  # raises ImportError if not built

    BACKEND = "cython"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

HAVE_COMPILED = BACKEND == "cython"

uniform_pair = _impl.uniform_pair
normal_pair = _impl.normal_pair
gbm_paths = _impl.gbm_paths
bm_paths = _impl.bm_paths
ou_paths = _impl.ou_paths


def backend_name() -> str:
    """Name of the active kernel backend ('cython' or 'python')."""
    return BACKEND


def get_backends() -> dict:
    """All importable kernel backends, keyed by name (for benchmarks/tests)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
