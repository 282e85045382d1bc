"""Backend selection for the time-stepping kernel.

The compiled extension ``_kernels`` is preferred; the pure-Python module
``_pykernels`` is the fallback. ``SQDMNP_BACKEND=python`` (or ``compiled``)
forces a choice at import time; :func:`get_backend` can override per call.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

__all__ = ["get_backend", "available_backends", "DEFAULT"]

_BACKENDS = {"python": _pykernels}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends():
    return tuple(_BACKENDS)


def get_backend(name=None):
    """Kernel module for ``name`` ('compiled', 'python', 'auto' or None for the default)."""
    if name in (None, "auto"):
        return DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})") from None


def _select_default():
    choice = os.environ.get("SQDMNP_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return _BACKENDS.get("compiled", _pykernels)
    if choice not in _BACKENDS:
        raise ImportError(f"SQDMNP_BACKEND={choice!r} requested but not available")
    return _BACKENDS[choice]


DEFAULT = _select_default()
