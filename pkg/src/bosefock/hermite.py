"""Normalized probabilists' Hermite polynomials and Gauss-Hermite quadrature.

``H_k`` is orthonormal for the standard Gaussian weight
``exp(-t**2 / 2) / sqrt(2*pi)`` and obeys ``H_k' = sqrt(k) H_{k-1}``.
Quadrature weights sum to one (probability normalization), so physicists'
tables must not be mixed in without rescaling.
"""

from functools import lru_cache

import numpy as np

from . import kernels
from .errors import ConvergenceError

MAX_DEGREE = 512
MAX_ORDER = 128
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def hermite_table(max_degree, t):
    """Rows ``H_0(t) .. H_max_degree(t)`` by the three-term recurrence.

    ``H_{k+1}(t) = (t H_k(t) - sqrt(k) H_{k-1}(t)) / sqrt(k + 1)``.
    """
    if not 0 <= max_degree <= MAX_DEGREE:
        raise ValueError(f"degree must be in 0..{MAX_DEGREE}, got {max_degree}")
    t = np.asarray(t, dtype=float)
    out = np.empty((max_degree + 1,) + t.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = t
    for k in range(1, max_degree):
        out[k + 1] = (t * out[k] - np.sqrt(k) * out[k - 1]) / np.sqrt(k + 1)
    return out


def hermite_eval(k, t):
    """Value of ``H_k`` at ``t`` (scalar or array)."""
    if k < 0:
        raise ValueError(f"degree must be non-negative, got {k}")
    vals = hermite_table(k, t)[k]
    return float(vals) if np.ndim(vals) == 0 else vals


def hermite_derivative_check(k, t, step=1e-5):
    """``|central difference of H_k at t - sqrt(k) H_{k-1}(t)|``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    fd = (hermite_eval(k, np.add(t, step)) - hermite_eval(k, np.subtract(t, step))) / (2 * step)
    return np.abs(fd - np.sqrt(k) * hermite_eval(k - 1, t))


def jacobi_matrix(order):
    """Symmetric tridiagonal recurrence matrix with off-diagonal ``sqrt(1..order-1)``.

    It is also the matrix of ``a + adag`` on a single mode truncated to
    ``order`` levels.
    """
    off = np.sqrt(np.arange(1, order, dtype=float))
    return np.diag(off, 1) + np.diag(off, -1)


@lru_cache(maxsize=None)
def _gauss_hermite_cached(order, backend):
    impl = kernels if backend is None else kernels.get_backend(backend)
    j = np.ascontiguousarray(jacobi_matrix(order), dtype=np.complex128)
    w, _, sweeps = impl.jacobi_eigh(j, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi eigensolver did not converge for order {order}")
    t = np.sort(w)
    # Newton polish on H_order(t) = 0, then enforce the node symmetry
    for _ in range(3):
        tab = hermite_table(order, t)
        t = t - tab[order] / (np.sqrt(order) * tab[order - 1])
    t = 0.5 * (t - t[::-1])
    # Christoffel weights keep full relative precision in the tails
    tab = hermite_table(order - 1, t)
    weights = 1.0 / np.sum(tab * tab, axis=0)
    weights = 0.5 * (weights + weights[::-1])
    t.setflags(write=False)
    weights.setflags(write=False)
    return t, weights


def gauss_hermite(order, backend=None):
    """Nodes and weights for the standard Gaussian weight.

    Nodes are the eigenvalues of :func:`jacobi_matrix` (Golub-Welsch, cyclic
    Jacobi eigensolver) refined by Newton steps; weights come from the
    Christoffel numbers ``1 / sum_k H_k(t_i)**2``.

    Parameters
    ----------
    order : int
        Number of nodes, ``1 <= order <= 128``. The rule integrates
        polynomials up to degree ``2*order - 1`` exactly.
    backend : str, optional
        Kernel backend for the eigensolve (``"python"`` or ``"cython"``).

    Returns
    -------
    nodes, weights : ndarray
        Read-only arrays; ``weights.sum() == 1`` up to rounding.
    """
    order = int(order)
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
    return _gauss_hermite_cached(order, backend)


def field_exponential(size, theta):
    """``exp(i*theta*J)`` for the size-``size`` Jacobi matrix ``J``.

    Uses the spectral decomposition ``J = V diag(t) V^T`` with
    ``V[k, i] = H_k(t_i) sqrt(w_i)``.
    """
    if size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    t, w = _gauss_hermite_cached(int(size), None)
    v = hermite_table(size - 1, t) * np.sqrt(w)
    return (v * np.exp(1j * theta * t)) @ v.T
