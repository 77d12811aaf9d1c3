"""Hot kernels with two interchangeable backends.

``STICKYCUT_BACKEND=numpy`` forces the vectorized pure-numpy path; the
default is numba when it imports, numpy otherwise.
"""
import importlib
import os

from ._constants import POWER, TABULATED, XI

_VALID = ("numba", "numpy")


def load(name):
    """Return the kernel module for backend ``name``."""
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    return importlib.import_module(f"{__name__}._{name}")


def _select():
    requested = os.environ.get("STICKYCUT_BACKEND", "numba").strip().lower() or "numba"
    if requested == "numba":
        try:
            return load("numba")
        except ImportError:
            return load("numpy")
    return load(requested)


active = _select()
BACKEND = active.NAME

__all__ = ["active", "BACKEND", "load", "XI", "POWER", "TABULATED"]
