import numpy as np
import pytest

from asmlab.measures import Povm, SampleSpace


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_hermitian(rng, n):
    m = random_matrix(rng, n)
    return (m + m.conj().T) / 2


def random_density(rng, n):
    m = random_matrix(rng, n)
    g = m @ m.conj().T
    return g / np.trace(g).real


def random_normalized_povm(rng, n, k):
    """k random effects on C^n summing to I (oracle-side construction).

    Uses LAPACK for the inverse square root so the generator stays
    independent of the package's own eigensolver.
    """
    gs = []
    for _ in range(k):
        m = random_matrix(rng, n)
        gs.append(m @ m.conj().T)
    s = sum(gs)
    w, v = np.linalg.eigh(s)
    s_inv_sqrt = v @ np.diag(1.0 / np.sqrt(w)) @ v.conj().T
    effects = [s_inv_sqrt @ g @ s_inv_sqrt for g in gs]
    space = SampleSpace(points=tuple(f"o{i}" for i in range(k)))
    return Povm(space, effects)
