"""Kernel backend selection.

The package ships two interchangeable kernel implementations:

* ``numba`` - jitted strided loops, the default when numba imports.
* ``numpy`` - pure-numpy fallback, no compilation step.

``QCSE_BACKEND=numpy|numba`` forces one; unset picks numba when it is
importable. Both backends run each circuit single-threaded and produce
results that do not depend on host core count; process-level parallelism
(CLI sweeps) is governed separately by ``QCSE_THREADS`` and
``QCSE_DETERMINISTIC`` - see ``qcse.cli``.
"""

from __future__ import annotations

import os
from types import ModuleType

_backend: ModuleType | None = None
_backend_name = ""


def _load(name: str) -> ModuleType:
    if name == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def kernels() -> ModuleType:
    """Return the active kernel module, resolving it on first call."""
    global _backend, _backend_name
    if _backend is None:
        name = os.environ.get("QCSE_BACKEND", "").strip().lower()
        if name:
            _backend = _load(name)
            _backend_name = name
        else:
            try:
                _backend = _load("numba")
                _backend_name = "numba"
            except ImportError:
                _backend = _load("numpy")
                _backend_name = "numpy"
    return _backend


def backend_name() -> str:
    kernels()
    return _backend_name


def set_backend(name: str) -> None:
    """Force a backend (tests and benchmarks)."""
    global _backend, _backend_name
    _backend = _load(name)
    _backend_name = name
