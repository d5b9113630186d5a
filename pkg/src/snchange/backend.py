"""Kernel backend selection: numba-compiled loops or pure numpy.

The backend is chosen from the ``SNCHANGE_BACKEND`` environment variable
("numba" or "numpy"); numba is the default when importable.  Tests and the
benchmark switch programmatically via :func:`set_backend`.
"""

from __future__ import annotations

import os

from . import _np_kernels

_ENV_VAR = "SNCHANGE_BACKEND"
_active = None


def _resolve_default() -> str:
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested in ("numba", "numpy"):
        return requested
    if requested:
        raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {requested!r}")
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def active_backend() -> str:
    global _active
    if _active is None:
        _active = _resolve_default()
    return _active


def set_backend(name: str | None) -> None:
    """Force a backend ("numba"/"numpy"); None re-reads the environment."""
    global _active
    if name is None:
        _active = None
        return
    name = name.lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba":
        import numba  # noqa: F401
    _active = name


def kernels():
    """Return the module implementing the kernel surface."""
    if active_backend() == "numba":
        from . import _nb_kernels
        return _nb_kernels
    return _np_kernels
