from itertools import permutations

import numpy as np
import pytest

from bosefock import kernels
from bosefock.fock import TruncatedBasis
from bosefock.quantization import gamma_blocks


def brute_permanent(a):
    n = a.shape[0]
    return sum(np.prod([a[i, p[i]] for i in range(n)]) for p in permutations(range(n)))


def test_cython_backend_is_built():
    assert "cython" in kernels.BACKENDS
    assert kernels.BACKEND == "cython"


def test_unknown_backend():
    with pytest.raises(ValueError, match="not available"):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("n", range(1, 7))
def test_permanent_matches_brute_force(backend, rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    got = kernels.get_backend(backend).permanent(np.ascontiguousarray(a))
    want = brute_permanent(a)
    assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


@pytest.mark.parametrize(
    "matrix, value",
    [(np.eye(3), 1.0), (np.ones((3, 3)), 6.0), ([[1, 2], [3, 4]], 10.0), (np.zeros((0, 0)), 1.0)],
)
def test_permanent_examples(backend, matrix, value):
    a = np.ascontiguousarray(matrix, dtype=np.complex128)
    assert kernels.get_backend(backend).permanent(a) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_jacobi_eigh(backend, rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = (a + a.conj().T) / 2
    w, v, sweeps = kernels.get_backend(backend).jacobi_eigh(np.ascontiguousarray(a), 1e-14, 100)
    assert sweeps >= 0
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-12)
    assert np.abs(a @ v - v * w).max() <= 1e-10 * np.linalg.norm(a, 2)
    assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-12


def test_jacobi_reports_sweep_cap(backend, rng):
    a = rng.standard_normal((8, 8))
    a = np.ascontiguousarray((a + a.T) / 2, dtype=np.complex128)
    *_, sweeps = kernels.get_backend(backend).jacobi_eigh(a, 1e-14, 1)
    assert sweeps == -1


def test_backends_agree_on_substitution(rng):
    if "cython" not in kernels.BACKENDS:
        pytest.skip("extension not built")
    basis = TruncatedBasis(3, 6)
    v = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    py = gamma_blocks(basis, v, backend="python")
    cy = gamma_blocks(basis, v, backend="cython")
    for a, b in zip(py, cy):
        assert np.abs(a - b).max() <= 1e-12 * max(1.0, np.abs(a).max())
