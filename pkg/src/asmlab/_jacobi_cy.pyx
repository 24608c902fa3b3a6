# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cyclic Jacobi eigensolver for complex Hermitian matrices, compiled backend.

Same contract as asmlab._jacobi_py.jacobi_eigh; the rotation loops run in C.
"""
import numpy as np

cimport cython
from libc.math cimport sqrt


cdef inline double _cabs2(double complex z) noexcept:
    return z.real * z.real + z.imag * z.imag


cdef double _offdiag_mass(double complex[:, ::1] h, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += _cabs2(h[i, j])
    return sqrt(acc)


def jacobi_eigh(double complex[:, ::1] h, double off_tol, int max_sweeps,
                bint with_vectors=True):
    """Diagonalize Hermitian ``h`` in place; see the python backend docstring."""
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t p, q, i, sweeps
    cdef double off, skip, ab, tau, t, c
    cdef double complex b, phase, w, cw, hp, hq

    v_arr = np.eye(n, dtype=np.complex128) if with_vectors else None
    cdef double complex[:, ::1] v = v_arr if with_vectors else None

    if n < 2:
        return np.real(np.diagonal(np.asarray(h))).copy(), v_arr, 0, 0.0

    off = _offdiag_mass(h, n)
    skip = off_tol / n
    sweeps = 0
    while off > off_tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = h[p, q]
                ab = sqrt(_cabs2(b))
                if ab <= skip:
                    continue
                phase = b / ab
                tau = (h[q, q].real - h[p, p].real) / (2.0 * ab)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                w = (t * c) * phase
                cw = w.conjugate()

                for i in range(n):
                    hp = h[i, p]
                    hq = h[i, q]
                    h[i, p] = c * hp - cw * hq
                    h[i, q] = w * hp + c * hq
                for i in range(n):
                    hp = h[p, i]
                    hq = h[q, i]
                    h[p, i] = c * hp - w * hq
                    h[q, i] = cw * hp + c * hq
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real

                if with_vectors:
                    for i in range(n):
                        hp = v[i, p]
                        hq = v[i, q]
                        v[i, p] = c * hp - cw * hq
                        v[i, q] = w * hp + c * hq
        sweeps += 1
        off = _offdiag_mass(h, n)

    return np.real(np.diagonal(np.asarray(h))).copy(), v_arr, sweeps, off
