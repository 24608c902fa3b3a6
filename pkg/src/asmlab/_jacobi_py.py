"""Cyclic Jacobi eigensolver for complex Hermitian matrices, pure-python backend.

Reference implementation used when the compiled extension is unavailable.
Rotations are applied with numpy slice updates, so each rotation costs O(n);
semantics match asmlab._jacobi_cy exactly.
"""
from __future__ import annotations

import math

import numpy as np


def _offdiag_mass(h: np.ndarray) -> float:
    # Summing only off-diagonal entries avoids the cancellation that a
    # total-minus-diagonal formula hits once the matrix is nearly diagonal.
    n = h.shape[0]
    mask = ~np.eye(n, dtype=bool)
    return math.sqrt(float(np.sum(np.abs(h[mask]) ** 2)))


def jacobi_eigh(h, off_tol, max_sweeps, with_vectors=True):
    """Diagonalize Hermitian ``h`` in place by cyclic Jacobi rotations.

    Parameters
    ----------
    h : (n, n) complex128 array, C-contiguous
        Hermitian input; overwritten. The caller owns the copy.
    off_tol : float
        Absolute target for the off-diagonal Frobenius mass.
    max_sweeps : int
        Cap on full cyclic sweeps.
    with_vectors : bool
        Accumulate the unitary of eigenvectors (skipped for norm-only use).

    Returns
    -------
    (eigenvalues, vectors, sweeps, off)
        Unsorted real eigenvalues, accumulated unitary (or None), sweeps
        used, and the final off-diagonal mass.
    """
    n = h.shape[0]
    v = np.eye(n, dtype=np.complex128) if with_vectors else None
    if n < 2:
        return np.real(np.diagonal(h)).copy(), v, 0, 0.0

    off = _offdiag_mass(h)
    skip = off_tol / n  # if every pivot is below this, the mass is within target
    sweeps = 0
    while off > off_tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = h[p, q]
                ab = abs(b)
                if ab <= skip:
                    continue
                phase = b / ab
                tau = (h[q, q].real - h[p, p].real) / (2.0 * ab)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                w = (t * c) * phase

                hp = h[:, p].copy()
                hq = h[:, q].copy()
                h[:, p] = c * hp - np.conj(w) * hq
                h[:, q] = w * hp + c * hq
                rp = h[p, :].copy()
                rq = h[q, :].copy()
                h[p, :] = c * rp - w * rq
                h[q, :] = np.conj(w) * rp + c * rq
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real

                if with_vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - np.conj(w) * vq
                    v[:, q] = w * vp + c * vq
        sweeps += 1
        off = _offdiag_mass(h)

    return np.real(np.diagonal(h)).copy(), v, sweeps, off
