"""Kernel dispatch: compiled Cython core if importable, numpy fallback otherwise.

The active backend is chosen once at import. :func:`use_backend` switches it
at runtime (used by the benchmark and the backend-equivalence tests).
"""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Select the kernel backend by name; returns the previous name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def flip_answer_bit(amps, n, k):
    return _active.flip_answer_bit(amps, n, k)


def index_mass(amps, n):
    return _active.index_mass(amps, n)


def apply_rotations(amps, ia, ib, u00, u01, u10, u11):
    return _active.apply_rotations(amps, ia, ib, u00, u01, u10, u11)
