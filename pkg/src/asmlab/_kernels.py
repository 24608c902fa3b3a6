"""Backend selection for the Jacobi eigensolver.

The compiled extension is preferred; the pure-python twin is the fallback so
the package works without a C toolchain. ``JACOBI_BACKEND`` records which one
was picked at import time.
"""
from __future__ import annotations

import math

import numpy as np

from asmlab import _jacobi_py

try:
    from asmlab import _jacobi_cy

    _raw = _jacobi_cy.jacobi_eigh
    JACOBI_BACKEND = "cython"
except ImportError:
    _raw = _jacobi_py.jacobi_eigh
    JACOBI_BACKEND = "python"


class ConvergenceError(RuntimeError):
    """Jacobi sweeps exhausted before the off-diagonal mass target was met."""


def available_backends() -> dict:
    """Raw kernels by name, for parity tests and benchmarks."""
    out = {"python": _jacobi_py.jacobi_eigh}
    if JACOBI_BACKEND == "cython":
        out["cython"] = _jacobi_cy.jacobi_eigh
    return out


def hermitian_eigh(h, off_tol, max_sweeps, with_vectors=True, kernel=None):
    """Sorted eigendecomposition of a Hermitian matrix.

    ``off_tol`` is relative: the kernel targets off-diagonal Frobenius mass
    <= off_tol * max(1, ||h||_F). Returns (ascending eigenvalues, unitary of
    column eigenvectors or None). Raises ConvergenceError past ``max_sweeps``.
    """
    a = np.array(h, dtype=np.complex128, order="C")
    scale = max(1.0, math.sqrt(float(np.sum(np.abs(a) ** 2))))
    target = off_tol * scale
    run = _raw if kernel is None else kernel
    w, v, _sweeps, off = run(a, target, max_sweeps, with_vectors)
    if off > target:
        raise ConvergenceError(
            f"cyclic Jacobi did not reach off-diagonal mass {target:.3e} "
            f"within {max_sweeps} sweeps (residual {off:.3e})"
        )
    order = np.argsort(w, kind="stable")
    if v is None:
        return w[order], None
    return w[order], np.asarray(v)[:, order]
