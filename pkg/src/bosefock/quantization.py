"""One-body spectra and second quantization on a truncated Fock space.

``d_gamma(H) = sum_ij H_ij adag_i a_j`` and ``gamma_substitution(V)`` acts on
polynomials by the linear change of variables ``z_j -> sum_i V_ij z_i``,
which on the ladder side reads ``Gamma(V) adag_j Gamma(V)^-1 = adag(V[:, j])``.
Both preserve the level, so they are exact on the truncated space.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import ConvergenceError, PositivityError
from .fock import annihilation_matrix, creation_matrix

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-12


def _check_hermitian(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS, backend=None):
    """Eigenpairs of a Hermitian matrix by cyclic Jacobi rotations.

    Returns
    -------
    w : ndarray
        Ascending eigenvalues.
    v : ndarray
        Orthonormal eigenvectors in columns; each column is phased so its
        largest-magnitude entry is real and positive.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the off-diagonal tolerance.
    """
    m = _check_hermitian(m)
    if m.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    impl = kernels if backend is None else kernels.get_backend(backend)
    w, v, sweeps = impl.jacobi_eigh(np.ascontiguousarray(m), tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi eigensolver hit the {max_sweeps}-sweep cap")
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    pivot = v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])]
    v = v * (np.abs(pivot) / pivot)
    return w, v


@dataclass(frozen=True)
class ThermalSpectrum:
    """Eigen-decomposition of ``exp(-beta (H - mu))`` for a one-body ``H``.

    ``lambdas[j] = exp(-beta (energies[j] - mu))`` lies in ``(0, 1)`` and
    ``vectors[:, j]`` is the matching eigenvector.
    """

    beta: float
    mu: float
    energies: np.ndarray
    lambdas: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if np.any(lam <= 0) or np.any(lam >= 1):
            raise PositivityError(
                "thermal weights must lie in (0, 1); need beta*(H - mu*I) > 0 "
                f"(got lambdas {lam})"
            )
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.shape != (lam.size, lam.size):
            raise ValueError("eigenvector matrix does not match the number of eigenvalues")
        if lam.size and np.abs(v.conj().T @ v - np.eye(lam.size)).max() > 1e-10:
            raise ValueError("eigenvectors are not orthonormal")
        for name, arr in (("energies", self.energies), ("lambdas", lam), ("vectors", v)):
            arr = np.array(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_modes(self):
        return self.lambdas.size

    @property
    def max_lambda(self):
        return float(self.lambdas.max(initial=0.0))

    @property
    def is_diagonal(self):
        return bool(np.allclose(self.vectors, np.eye(self.n_modes), rtol=0, atol=0))

    def one_body(self):
        """``exp(-beta (H - mu))`` in the mode basis."""
        return (self.vectors * self.lambdas) @ self.vectors.conj().T

    def to_eigenbasis(self, f):
        """Coordinates ``V^dagger f`` of a mode vector in the eigenbasis."""
        return self.vectors.conj().T @ np.asarray(f, dtype=np.complex128)


def thermal_spectrum(h, beta, mu=0.0, backend=None):
    """Thermal weights ``lambda_j = exp(-beta (h_j - mu))`` with eigenvectors.

    Raises
    ------
    PositivityError
        Unless ``beta * (H - mu*I)`` is positive definite.
    """
    beta = float(beta)
    mu = float(mu)
    energies, vectors = hermitian_eig(h, backend=backend)
    gaps = beta * (energies - mu)
    if beta <= 0 or np.any(gaps <= 0):
        raise PositivityError(
            "thermal state needs beta*(H - mu*I) > 0, i.e. beta > 0 and mu below the "
            f"lowest one-body energy (beta={beta}, mu={mu}, min energy={energies.min()})"
        )
    return ThermalSpectrum(beta, mu, energies, np.exp(-gaps), vectors)


def _check_one_body(basis, m):
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (basis.n_modes, basis.n_modes):
        raise ValueError(f"one-body matrix has shape {m.shape}, basis has {basis.n_modes} modes")
    return m


def d_gamma(basis, h):
    """``sum_ij H_ij adag_i a_j`` as a sparse matrix."""
    h = _check_one_body(basis, h)
    n = basis.n_modes
    cre = [creation_matrix(basis, i) for i in range(n)]
    ann = [annihilation_matrix(basis, j) for j in range(n)]
    out = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            if h[i, j] != 0:
                out = out + h[i, j] * (cre[i] @ ann[j])
    return out.tocsr()


def gamma_blocks(basis, v, backend=None):
    """Dense level blocks of ``Gamma(V)``; block ``k`` acts on level ``k``."""
    v = _check_one_body(basis, v)
    impl = kernels if backend is None else kernels.get_backend(backend)
    flat, starts = impl.substitution_blocks(
        np.ascontiguousarray(basis.occupations),
        np.ascontiguousarray(basis.raise_table),
        np.ascontiguousarray(basis.parent),
        np.ascontiguousarray(basis.parent_mode),
        np.ascontiguousarray(basis.level_offsets),
        np.ascontiguousarray(v),
    )
    if not np.all(np.isfinite(flat)):
        raise OverflowError("substitution matrix entries overflowed; reduce the cutoff or ||V||")
    sizes = np.diff(basis.level_offsets)
    return [flat[starts[k]:starts[k + 1]].reshape(sizes[k], sizes[k]) for k in range(len(sizes))]


def gamma_substitution(basis, v, backend=None):
    """Matrix of ``p(z) -> p(V^T z)``, the multiplicative lift of ``V``.

    Column ``alpha`` is ``prod_j adag(V[:, j])**alpha_j |vacuum> / sqrt(alpha!)``,
    built one particle at a time from its parent index. Diagonal ``V``
    takes a fast path with entries ``prod_j V_jj**alpha_j``.
    """
    v = _check_one_body(basis, v)
    if np.count_nonzero(v - np.diag(np.diag(v))) == 0:
        d = np.diag(v)
        powers = np.prod(d[None, :] ** basis.occupations, axis=1)
        return sp.diags(powers, format="csr")
    return sp.block_diag(gamma_blocks(basis, v, backend=backend), format="csr")


def exp_neg_beta_dgamma(basis, spectrum):
    """``exp(-beta dGamma(H - mu))`` as ``Gamma(exp(-beta (H - mu)))``."""
    if spectrum.n_modes != basis.n_modes:
        raise ValueError(
            f"spectrum has {spectrum.n_modes} modes, basis has {basis.n_modes}"
        )
    if spectrum.is_diagonal:
        return gamma_substitution(basis, np.diag(spectrum.lambdas).astype(np.complex128))
    return gamma_substitution(basis, spectrum.one_body())
