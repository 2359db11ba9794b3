"""Backend selection for the batched kernels.

The compiled module is used when it imports; otherwise, or when the
environment variable ``SYMPOS_PURE_PYTHON=1`` is set, the numpy fallback
is used.  Both expose identical functions.
"""
import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_NAMES = (
    "symplectic_defects",
    "sigma_pairs",
    "reciprocal_spectra",
    "unitary_phases",
    "generator_matrices",
    "pd_margins",
)


def available_backends():
    return ["python"] + (["cython"] if _ckernels is not None else [])


def get_backend(name=None):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name is None:
        name = BACKEND
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        return _ckernels
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown backend {name!r}")


if _ckernels is not None and os.environ.get("SYMPOS_PURE_PYTHON", "") != "1":
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = get_backend(BACKEND)


def _stack(a):
    a = np.ascontiguousarray(a, dtype=float)
    if not a.flags.writeable:
        a = a.copy()
    if a.ndim == 2:
        a = a[None]
    return a


def symplectic_defects(mats):
    return _impl.symplectic_defects(_stack(mats))


def sigma_pairs(mats):
    return _impl.sigma_pairs(_stack(mats))


def reciprocal_spectra(mats, disc_tol=1e-10, edge_tol=1e-9):
    return _impl.reciprocal_spectra(_stack(mats), disc_tol, edge_tol)


def unitary_phases(mats):
    return _impl.unitary_phases(_stack(mats))


def generator_matrices(vel, mats):
    return _impl.generator_matrices(_stack(vel), _stack(mats))


def pd_margins(P):
    return _impl.pd_margins(_stack(P))
