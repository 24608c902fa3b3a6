"""Dense complex matrix core: adjoints, operator norms, Hermitian spectra.

Matrices are plain numpy arrays. The graded constructors ``as_matrix``,
``as_hermitian`` and ``as_density`` validate and canonicalize their input;
operations downstream assume validated arrays. The eigensolver is the
package's own cyclic Jacobi kernel (compiled when available), so the whole
stack is self-contained; numpy supplies only array arithmetic.
"""
from __future__ import annotations

import math

import numpy as np

from asmlab._kernels import ConvergenceError, hermitian_eigh
from asmlab.config import Tolerances, resolve

__all__ = [
    "ConvergenceError",
    "adjoint",
    "as_density",
    "as_hermitian",
    "as_matrix",
    "hermitian_eig",
    "is_positive_semidefinite",
    "min_eigenvalue",
    "operator_norm",
    "psd_sqrt",
]


def as_matrix(m) -> np.ndarray:
    """Validate a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m)).T


def as_hermitian(m, tol: Tolerances | None = None) -> np.ndarray:
    """Validate near-Hermiticity and return the exactly symmetrized matrix.

    Rejects input whose max-entry deviation from its adjoint exceeds the
    hermiticity tolerance; the returned array is (M + M^dag)/2.
    """
    t = resolve(tol)
    a = as_matrix(m)
    dev = float(np.max(np.abs(a - adjoint(a)))) if a.size else 0.0
    if dev > t.hermiticity:
        raise ValueError(
            f"matrix is not Hermitian: max |M - M^dag| = {dev:.3e} > {t.hermiticity:.1e}"
        )
    return (a + adjoint(a)) / 2.0


def hermitian_eig(h, tol: Tolerances | None = None, with_vectors: bool = True):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (ascending real eigenvalues, unitary with eigenvector columns);
    the unitary is None when ``with_vectors`` is False. Raises
    ConvergenceError if the sweep cap is hit (pathological input).
    """
    t = resolve(tol)
    a = as_hermitian(h, t)
    return hermitian_eigh(a, t.jacobi_off, t.jacobi_sweeps, with_vectors)


def operator_norm(m, tol: Tolerances | None = None) -> float:
    """Largest singular value, computed as sqrt(lambda_max(M^dag M)).

    Uses the C*-identity ||M||^2 = ||M^dag M||, reducing the norm of a
    general matrix to a Hermitian eigenvalue problem.
    """
    t = resolve(tol)
    a = as_matrix(m)
    if a.shape[0] == 0:
        return 0.0
    gram = adjoint(a) @ a
    gram = (gram + adjoint(gram)) / 2.0
    w, _ = hermitian_eigh(gram, t.jacobi_off, t.jacobi_sweeps, with_vectors=False)
    return math.sqrt(max(float(w[-1]), 0.0))


def min_eigenvalue(h, tol: Tolerances | None = None) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    w, _ = hermitian_eig(h, tol, with_vectors=False)
    return float(w[0])


def is_positive_semidefinite(h, tol: float | None = None,
                             tolerances: Tolerances | None = None) -> bool:
    """True iff every eigenvalue is >= -tol (default: the psd tolerance)."""
    t = resolve(tolerances)
    bound = t.psd if tol is None else float(tol)
    if bound < 0:
        raise ValueError("tolerance must be nonnegative")
    return min_eigenvalue(h, t) >= -bound


def psd_sqrt(h, tol: Tolerances | None = None) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Eigenvalues within the psd tolerance below zero are clamped to zero;
    anything more negative is rejected.
    """
    t = resolve(tol)
    w, v = hermitian_eig(h, t)
    if float(w[0]) < -t.psd:
        raise ValueError(
            f"matrix is not positive semidefinite: min eigenvalue {float(w[0]):.3e}"
        )
    root = v @ (np.sqrt(np.clip(w, 0.0, None))[:, None] * adjoint(v))
    return (root + adjoint(root)) / 2.0


def as_density(m, tol: Tolerances | None = None) -> np.ndarray:
    """Validate a density operator: Hermitian, PSD, unit trace."""
    t = resolve(tol)
    a = as_hermitian(m, t)
    lo = min_eigenvalue(a, t)
    if lo < -t.psd:
        raise ValueError(f"state is not positive semidefinite: min eigenvalue {lo:.3e}")
    tr = complex(np.trace(a)).real
    if abs(tr - 1.0) > t.trace:
        raise ValueError(f"state trace {tr!r} deviates from 1 beyond {t.trace:.1e}")
    return a
