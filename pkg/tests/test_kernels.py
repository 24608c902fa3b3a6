"""Backend selection and Jacobi kernel behavior, checked against LAPACK."""
import numpy as np
import pytest

import asmlab
from asmlab._kernels import ConvergenceError, available_backends, hermitian_eigh
from conftest import random_hermitian


def test_backend_reported():
    assert asmlab.JACOBI_BACKEND in ("cython", "python")
    assert asmlab.JACOBI_BACKEND in available_backends()
    assert "python" in available_backends()


@pytest.mark.parametrize("name", sorted(available_backends()))
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
def test_matches_lapack(name, n, rng):
    kern = available_backends()[name]
    for _ in range(5):
        h = random_hermitian(rng, n)
        w, v = hermitian_eigh(h, 1e-13, 100, kernel=kern)
        assert np.all(np.diff(w) >= 0)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-12)
        assert np.linalg.norm(v.conj().T @ v - np.eye(n), 2) < 1e-12
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h, 2) < 1e-11


@pytest.mark.skipif(len(available_backends()) < 2,
                    reason="compiled backend not built")
def test_backend_parity(rng):
    kerns = available_backends()
    for n in (2, 4, 9, 16):
        h = random_hermitian(rng, n)
        w_py, v_py = hermitian_eigh(h, 1e-13, 100, kernel=kerns["python"])
        w_cy, v_cy = hermitian_eigh(h, 1e-13, 100, kernel=kerns["cython"])
        np.testing.assert_allclose(w_py, w_cy, atol=1e-12)
        for w, v in ((w_py, v_py), (w_cy, v_cy)):
            assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h, 2) < 1e-11


def test_no_vector_mode(rng):
    h = random_hermitian(rng, 6)
    w, v = hermitian_eigh(h, 1e-13, 100, with_vectors=False)
    assert v is None
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-12)


def test_trivial_sizes():
    w, v = hermitian_eigh(np.array([[2.5]]), 1e-13, 100)
    assert w[0] == 2.5
    assert v.shape == (1, 1)
    w, _ = hermitian_eigh(np.zeros((4, 4)), 1e-13, 100)
    np.testing.assert_array_equal(w, np.zeros(4))


def test_sweep_cap_raises(rng):
    h = random_hermitian(rng, 6)
    with pytest.raises(ConvergenceError):
        hermitian_eigh(h, 1e-13, 0)


def test_already_diagonal_is_instant():
    h = np.diag([3.0, 1.0, 2.0]).astype(complex)
    w, v = hermitian_eigh(h, 1e-13, 100)
    np.testing.assert_array_equal(w, [1.0, 2.0, 3.0])
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h, 2) < 1e-14
