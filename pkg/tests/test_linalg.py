"""Matrix core: adjoints, norms, spectra, square roots."""
import numpy as np
import pytest

from asmlab import linalg
from asmlab.spin import PAULI
from conftest import random_hermitian, random_matrix

SX, SY, SZ = PAULI


def test_as_matrix_rejects_bad_shapes():
    with pytest.raises(ValueError):
        linalg.as_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        linalg.as_matrix([1.0, 2.0])
    with pytest.raises(ValueError):
        linalg.as_matrix([[np.nan, 0], [0, 1]])
    with pytest.raises(ValueError):
        linalg.as_matrix([[np.inf * 1j, 0], [0, 1]])


class TestAdjoint:
    def test_identity_self_adjoint(self):
        eye = np.eye(3, dtype=complex)
        np.testing.assert_array_equal(linalg.adjoint(eye), eye)

    def test_pauli_y_self_adjoint(self):
        np.testing.assert_array_equal(linalg.adjoint(SY), SY)

    def test_involution(self, rng):
        for _ in range(20):
            m = random_matrix(rng, int(rng.integers(1, 9)))
            np.testing.assert_array_equal(linalg.adjoint(linalg.adjoint(m)), m)

    def test_anti_multiplicative(self, rng):
        # BLAS may reorder the two accumulation routes, so this holds to
        # machine precision rather than bit-exactly.
        for _ in range(50):
            n = int(rng.integers(1, 9))
            s = random_matrix(rng, n)
            t = random_matrix(rng, n)
            lhs = linalg.adjoint(s @ t)
            rhs = linalg.adjoint(t) @ linalg.adjoint(s)
            assert np.max(np.abs(lhs - rhs)) <= 1e-13

    def test_anti_linear(self, rng):
        s = random_matrix(rng, 4)
        t = random_matrix(rng, 4)
        a, b = 1.5 - 0.5j, -2.0 + 1j
        np.testing.assert_allclose(
            linalg.adjoint(a * s + b * t),
            np.conj(a) * linalg.adjoint(s) + np.conj(b) * linalg.adjoint(t),
            atol=0,
        )


class TestOperatorNorm:
    def test_identity(self):
        assert linalg.operator_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-14)

    def test_zero(self):
        assert linalg.operator_norm(np.zeros((3, 3))) == 0.0

    def test_pauli_x(self):
        # independent route: sigma_x^dag sigma_x = I, largest eigenvalue 1
        gram_eigs = np.linalg.eigvalsh(SX.conj().T @ SX)
        assert gram_eigs[-1] == pytest.approx(1.0, abs=1e-15)
        assert linalg.operator_norm(SX) == pytest.approx(1.0, abs=1e-12)

    def test_matches_svd(self, rng):
        for _ in range(30):
            m = random_matrix(rng, int(rng.integers(1, 9)))
            assert linalg.operator_norm(m) == pytest.approx(
                np.linalg.norm(m, 2), rel=1e-11, abs=1e-12
            )

    def test_cstar_identity(self, rng):
        for _ in range(200):
            m = random_matrix(rng, int(rng.integers(1, 9)))
            nm = linalg.operator_norm(m)
            gram = linalg.operator_norm(linalg.adjoint(m) @ m)
            assert abs(nm**2 - gram) <= 1e-9 * nm**2 + 1e-15


class TestHermitianEig:
    def test_pauli_z_eigenvalues(self):
        w, _ = linalg.hermitian_eig(SZ)
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)

    def test_degenerate_diagonal(self):
        w, _ = linalg.hermitian_eig(np.diag([2.0, 2.0, 5.0]))
        np.testing.assert_allclose(w, [2.0, 2.0, 5.0], atol=1e-14)

    def test_pauli_x_against_characteristic_roots(self):
        # char poly of sigma_x is l^2 - 1; brute-force its roots
        roots = np.sort(np.roots([1.0, 0.0, -1.0]))
        w, _ = linalg.hermitian_eig(SX)
        np.testing.assert_allclose(w, roots, atol=1e-12)

    def test_reconstruction_and_unitarity(self, rng):
        for n in (2, 5, 16):
            h = random_hermitian(rng, n)
            w, v = linalg.hermitian_eig(h)
            scale = max(1.0, np.linalg.norm(h, 2))
            assert np.linalg.norm(v.conj().T @ v - np.eye(n), 2) <= 1e-10
            assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h, 2) <= 1e-10 * scale

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(ValueError):
            linalg.hermitian_eig(random_matrix(rng, 3))


class TestPsd:
    def test_identity_is_psd(self):
        assert linalg.is_positive_semidefinite(np.eye(4), 0.0)

    def test_negative_identity_is_not(self):
        assert not linalg.is_positive_semidefinite(-np.eye(4), 1e-10)

    def test_bloch_ball_state_is_psd(self):
        x = (0.6, 0.0, 0.8)
        rho = (np.eye(2) + x[0] * SX + x[1] * SY + x[2] * SZ) / 2
        assert linalg.is_positive_semidefinite(rho, 1e-10)

    def test_rejects_negative_tolerance(self):
        with pytest.raises(ValueError):
            linalg.is_positive_semidefinite(np.eye(2), -1.0)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(linalg.psd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(
            linalg.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12
        )

    def test_quarter_identity(self):
        np.testing.assert_allclose(
            linalg.psd_sqrt(np.eye(2) / 4), np.eye(2) / 2, atol=1e-12
        )

    def test_square_and_commute(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 9))
            m = random_matrix(rng, n)
            h = m @ m.conj().T
            r = linalg.psd_sqrt(h)
            scale = max(1.0, np.linalg.norm(h, 2))
            assert np.linalg.norm(r @ r - h, 2) <= 1e-9 * scale
            assert np.linalg.norm(r @ h - h @ r, 2) <= 1e-9 * scale
            assert linalg.is_positive_semidefinite(r, 1e-10)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            linalg.psd_sqrt(np.diag([1.0, -0.5]))


class TestConstructors:
    def test_as_hermitian_symmetrizes(self, rng):
        h = random_hermitian(rng, 4)
        out = linalg.as_hermitian(h + 1e-14 * 1j * np.eye(4))
        np.testing.assert_array_equal(out, linalg.adjoint(out))

    def test_as_hermitian_rejects(self, rng):
        with pytest.raises(ValueError):
            linalg.as_hermitian(random_matrix(rng, 3))

    def test_as_density_accepts_states(self, rng):
        m = random_matrix(rng, 3)
        g = m @ m.conj().T
        rho = g / np.trace(g).real
        out = linalg.as_density(rho)
        assert abs(np.trace(out) - 1.0) < 1e-12

    def test_as_density_rejects_trace(self):
        with pytest.raises(ValueError):
            linalg.as_density(np.eye(2))

    def test_as_density_rejects_negative(self):
        with pytest.raises(ValueError):
            linalg.as_density(np.diag([1.5, -0.5]))
