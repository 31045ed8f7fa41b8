"""Backend selection for the density-matrix hot loop.

The compiled Cython kernels are used when the extension was built; otherwise
(or when ``HUBSIM_PURE_PYTHON`` is set) the numpy fallback is used. Callers
go through this module's attributes so :func:`use_backend` can swap them at
runtime, e.g. for benchmarking.
"""

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

BACKEND = ""
apply_unitary = None
apply_kraus = None
_partial_trace = None


def available_backends():
    return sorted(_BACKENDS)


def use_backend(name):
    """Select ``"cython"`` or ``"python"`` kernels for all subsequent calls."""
    global BACKEND, apply_unitary, apply_kraus, _partial_trace
    try:
        mod = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}") from None
    BACKEND = name
    apply_unitary = mod.apply_unitary
    apply_kraus = mod.apply_kraus
    _partial_trace = mod.partial_trace


def partial_trace(rho, index_map):
    return _partial_trace(rho, np.ascontiguousarray(index_map, dtype=np.intp))


use_backend("python" if os.environ.get("HUBSIM_PURE_PYTHON") or _ckernels is None else "cython")
