"""Kinematics kernel backend selection.

The compiled Cython backend is used when importable; otherwise the NumPy
fallback. Override with WBTELEOP_BACKEND=python|cython or `set_backend`.
"""

from __future__ import annotations

import os

from . import py_backend

_backends = {"python": py_backend}
try:
    from . import cy_backend

    _backends["cython"] = cy_backend
except ImportError:  # extension not built
    cy_backend = None

_active = _backends.get(os.environ.get("WBTELEOP_BACKEND", ""), None)
if _active is None:
    _active = _backends.get("cython", py_backend)


def available_backends() -> list[str]:
    return sorted(_backends)


def backend_name() -> str:
    return _active.NAME


def set_backend(name: str) -> None:
    global _active
    if name not in _backends:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _active = _backends[name]


def get_backend(name: str | None = None):
    if name is None:
        return _active
    if name not in _backends:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    return _backends[name]
