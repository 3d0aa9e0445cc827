"""Coherent vectors, displacement and Weyl operators, Toeplitz operators.

Conventions (derived in ``docs/conventions.md``):

* basis monomials ``e_alpha(z) = prod_j z_j**a_j / sqrt(2**a_j a_j!)`` are
  orthonormal for ``(2*pi)**-n exp(-|z|**2 / 2) dz``;
* multiplication by ``z_j`` is ``sqrt(2) adag_j`` and ``d/dz_j`` is
  ``a_j / sqrt(2)``; the symbol ``e_1(z_j) = z_j / sqrt(2)`` gives exactly
  ``adag_j``;
* ``<x, z> = sum_j conj(x_j) z_j`` and ``U_x = exp(adag(conj(x)) / sqrt(2) - h.c.)``,
  i.e. the standard displacement with amplitude ``conj(x) / sqrt(2)``;
* ``Phi(x) = (adag(x) + a(x)) / sqrt(2)`` with ``adag(x) = sum_j x_j adag_j``,
  so ``exp(i Phi(x)) = U_{-i conj(x)}`` and ``Phi(x)`` is the Toeplitz
  operator of ``Re(sum_j x_j z_j)``.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import QuadratureError
from .fock import (
    TruncatedBasis,
    annihilation_smeared,
    as_mode_vector,
    compressed_norm,
    creation_smeared,
)
from .hermite import field_exponential, gauss_hermite
from .quantization import gamma_blocks

SQRT2 = np.sqrt(2.0)


def _mode_tables(x, max_level):
    """``tab[j, k] = x_j**k / sqrt(2**k k!)`` by a stable product recurrence."""
    tab = np.ones((len(x), max_level + 1), dtype=np.complex128)
    for k in range(1, max_level + 1):
        tab[:, k] = tab[:, k - 1] * x / np.sqrt(2.0 * k)
    return tab


def monomials(basis, z):
    """Values ``e_alpha(z)`` for every basis index.

    ``z`` has shape ``(n,)`` or ``(samples, n)`` with ``n <= n_modes``; the
    result has shape ``(dim,)`` or ``(samples, dim)``.
    """
    z = np.asarray(z, dtype=np.complex128)
    single = z.ndim <= 1
    z = np.atleast_2d(z)
    if z.shape[1] > basis.n_modes:
        raise ValueError(f"point has {z.shape[1]} coordinates, basis has {basis.n_modes} modes")
    full = np.zeros((z.shape[0], basis.n_modes), dtype=np.complex128)
    full[:, : z.shape[1]] = z
    tab = np.ones((z.shape[0], basis.n_modes, basis.max_level + 1), dtype=np.complex128)
    for k in range(1, basis.max_level + 1):
        tab[:, :, k] = tab[:, :, k - 1] * full / np.sqrt(2.0 * k)
    out = np.prod(tab[:, np.arange(basis.n_modes)[None, :], basis.occupations], axis=2)
    return out[0] if single else out


def coherent_coeffs(basis, x):
    """Coefficients of the reproducing vector ``K_x(z) = exp(<x, z> / 2)``.

    Entry ``alpha`` is ``prod_j conj(x_j)**a_j / sqrt(2**a_j a_j!)``, so that
    ``<p, K_x> = p(x)`` for every polynomial ``p`` in the truncated space.
    """
    return np.conj(monomials(basis, x))


def evaluate(basis, coeffs, z):
    """Value at ``z`` of the polynomial with coefficients ``coeffs``."""
    return complex(monomials(basis, z) @ np.asarray(coeffs, dtype=np.complex128))


def _generator(basis, x):
    alpha = np.conj(as_mode_vector(x, basis.n_modes)) / SQRT2
    return creation_smeared(basis, alpha), annihilation_smeared(basis, alpha)


def displacement(basis, x, method="expm"):
    """Matrix of ``U_x f(z) = f(z - x) exp(<x, z>/2 - |x|**2/4)``.

    Parameters
    ----------
    basis : TruncatedBasis
    x : array_like
        Complex translation vector, at most ``basis.n_modes`` long.
    method : {"expm", "normal"}
        ``"expm"`` exponentiates the truncated anti-Hermitian generator
        (exactly unitary). ``"normal"`` uses the normal-ordered product
        ``exp(-|x|**2/4) exp(adag(alpha)) exp(-a(alpha))``, whose entries are
        the untruncated matrix elements but whose columns near the cutoff
        lose norm.
    """
    x = as_mode_vector(x, basis.n_modes)
    r2 = float(np.vdot(x, x).real)
    if r2 > basis.max_level / 4:
        warnings.warn(
            f"|x|^2 = {r2:.3g} exceeds cutoff/4; truncation error grows", RuntimeWarning,
            stacklevel=2,
        )
    cre, ann = _generator(basis, x)
    if method == "expm":
        out = sla.expm((cre - ann).toarray())
    elif method == "normal":
        out = np.exp(-r2 / 4) * (sla.expm(cre.toarray()) @ sla.expm(-ann.toarray()))
    else:
        raise ValueError(f"unknown method {method!r}")
    return sp.csr_matrix(out)


def weyl_phase(x, y):
    """``exp(-(i/2) Im<x, y>)`` with ``<x, y> = sum conj(x) y``."""
    return np.exp(-0.5j * np.vdot(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)).imag)


def displacement_apply(basis, x, vectors):
    """``U_x @ vectors`` without forming ``U_x``, via ``expm_multiply`` on the sparse generator."""
    cre, ann = _generator(basis, as_mode_vector(x, basis.n_modes))
    return expm_multiply((cre - ann).tocsc(), np.asarray(vectors, dtype=np.complex128))


def weyl_commutation_residual(basis, x, y, level_guard, compress=True):
    """Spectral norm of ``U_y U_x - exp(-(i/2) Im<x,y>) U_{x+y}`` on low levels.

    With ``compress=True`` the residual is projected on both sides onto levels
    ``<= level_guard``; otherwise only the columns are restricted. Only the
    guarded columns are propagated, so the cost scales with their number.
    """
    n = basis.n_modes
    x = as_mode_vector(x, n)
    y = as_mode_vector(y, n)
    if not np.any(x) or not np.any(y):
        return 0.0
    stop = int(basis.level_offsets[min(level_guard, basis.max_level) + 1])
    cols = np.eye(basis.dim, stop, dtype=np.complex128)
    res = displacement_apply(basis, y, displacement_apply(basis, x, cols))
    res -= weyl_phase(x, y) * displacement_apply(basis, x + y, cols)
    if compress:
        res = res[:stop]
    return float(np.linalg.norm(res, 2))


def _linear_form(c, z):
    """``sum_j c_j z_j``; single-mode forms act elementwise, otherwise modes are the last axis."""
    z = np.asarray(z, dtype=np.complex128)
    if len(c) == 1:
        return c[0] * (z[..., 0] if z.ndim and z.shape[-1] == 1 and z.ndim > 1 else z)
    return z[..., : len(c)] @ c


@dataclass(frozen=True)
class LinearSymbol:
    """``phi = sum_j c_j e_1(z_j)``, or its complex conjugate when ``conjugated``."""

    c: tuple
    conjugated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(complex(v) for v in np.atleast_1d(self.c)))

    @property
    def norm(self):
        """Norm of ``phi`` in the Gaussian space, ``|c|``."""
        return float(np.linalg.norm(self.c))

    def __call__(self, z):
        val = _linear_form(np.asarray(self.c), z) / SQRT2
        return np.conj(val) if self.conjugated else val


def toeplitz_linear(basis, symbol):
    """Toeplitz operator of a degree-one symbol: ``adag(c)`` or ``a(c)``."""
    if symbol.conjugated:
        return annihilation_smeared(basis, symbol.c)
    return creation_smeared(basis, symbol.c)


def quadrature_phi(basis, x):
    """Field operator ``(adag(x) + a(x)) / sqrt(2)``; Hermitian."""
    cre = creation_smeared(basis, x)
    return ((cre + cre.conj().T) / SQRT2).tocsr()


def _completing_unitary(u):
    """Unitary whose first column is the unit vector ``u``."""
    n = len(u)
    q, r = np.linalg.qr(np.column_stack([u, np.eye(n, dtype=np.complex128)]))
    q = q[:, :n].copy()
    q[:, 0] *= r[0, 0]
    return q


@lru_cache(maxsize=32)
def _mode0_chains(n_modes, max_level):
    """Index chains ``beta, beta + e_0, beta + 2 e_0, ...`` grouped by length."""
    basis = TruncatedBasis(n_modes, max_level)
    up = basis.raise_table[:, 0]
    starts = np.nonzero(basis.occupations[:, 0] == 0)[0]
    lengths = max_level - basis.levels[starts] + 1
    chains = {}
    for size in np.unique(lengths):
        cur = starts[lengths == size]
        rows = [cur]
        for _ in range(size - 1):
            cur = up[cur]
            rows.append(cur)
        chains[int(size)] = np.column_stack(rows)
    return chains


def field_exponential_mode0(basis, theta):
    """``exp(i theta (a_0 + adag_0))`` on the truncated space.

    The operator splits into independent chains along mode 0 with the other
    occupations fixed; each chain block is a Jacobi matrix exponential.
    """
    rows, cols, vals = [], [], []
    for size, chain in _mode0_chains(basis.n_modes, basis.max_level).items():
        block = field_exponential(size, theta)
        rows.append(np.repeat(chain, size, axis=1).ravel())
        cols.append(np.tile(chain, (1, size)).ravel())
        vals.append(np.broadcast_to(block.ravel(), (len(chain), size * size)).ravel())
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(basis.dim, basis.dim),
    )


def weyl_rotation(basis, x):
    """``(R, theta)`` with ``exp(i Phi(x)) = Gamma(R) exp(i theta (a_0 + adag_0)) Gamma(R)^dagger``."""
    x = as_mode_vector(x, basis.n_modes)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        return np.eye(basis.n_modes, dtype=np.complex128), 0.0
    return _completing_unitary(x / norm), norm / SQRT2


def weyl_operator(basis, x):
    """``W(x) = exp(i Phi(x))``.

    A unitary ``R`` with first column ``x/|x|`` rotates ``Phi(x)`` onto
    ``|x| (a_0 + adag_0) / sqrt(2)``. That operator is exponentiated chain by
    chain through the spectral decomposition of the Hermite Jacobi matrix,
    and the result is rotated back with the level-preserving ``Gamma(R)``.
    """
    rot, theta = weyl_rotation(basis, x)
    if theta == 0.0:
        return sp.identity(basis.dim, dtype=np.complex128, format="csr")
    inner = field_exponential_mode0(basis, theta)
    if basis.n_modes == 1:
        g = sp.diags(rot[0, 0] ** np.arange(basis.dim), format="csr")
    else:
        g = sp.block_diag(gamma_blocks(basis, rot), format="csr")
    return (g @ inner @ g.conj().T).tocsr()


def weyl_symbol(x):
    """Symbol ``z -> exp(i Re(sum_j x_j z_j) + |x|**2 / 4)`` whose Toeplitz operator is ``W(x)``."""
    x = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    r2 = float(np.vdot(x, x).real)

    def phi(z):
        return np.exp(1j * _linear_form(x, z).real + r2 / 4)

    return phi


def _toeplitz_rule(symbol, max_level, order):
    t, w = gauss_hermite(order)
    u, v = np.meshgrid(t, t, indexing="ij")
    z = (u + 1j * v).ravel()
    sw = np.sqrt(np.outer(w, w).ravel())
    f = _mode_tables(z, max_level).T * sw  # f[k, node] = e_k(z) sqrt(weight)
    phi = np.asarray(symbol(z), dtype=np.complex128)
    if phi.shape != z.shape:
        phi = np.broadcast_to(phi, z.shape)
    return (f.conj() * phi) @ f.T


def toeplitz_quadrature(symbol, max_level, order=64, check_order=None, tol=1e-8):
    """Single-mode Toeplitz matrix ``<T_phi e_j, e_k>`` by Gauss-Hermite product quadrature.

    Entry ``[k, j]`` is ``int phi(z) e_j(z) conj(e_k(z)) dlambda(z)`` with
    ``z = u + i v`` and a tensor rule in ``u`` and ``v``.

    Parameters
    ----------
    symbol : callable
        Vectorized ``phi`` on complex arrays.
    max_level : int
        Cutoff ``D``; the result is ``(D+1) x (D+1)``.
    order : int
        Nodes per real axis; must satisfy ``order > max_level`` so that
        polynomial symbols of degree one are integrated exactly.
    check_order : int, optional
        Lower order used as a convergence check; defaults to ``order - 8``.
        Set to ``0`` to skip.
    tol : float
        Largest allowed entrywise change between the two orders.

    Raises
    ------
    QuadratureError
        If the order is too small for the cutoff or the check fails.
    """
    if order <= max_level:
        raise QuadratureError(f"order {order} cannot resolve cutoff {max_level}")
    mat = _toeplitz_rule(symbol, max_level, order)
    if check_order is None:
        check_order = order - 8
    if check_order and check_order > max_level:
        coarse = _toeplitz_rule(symbol, max_level, check_order)
        change = float(np.abs(mat - coarse).max())
        if change > tol:
            raise QuadratureError(
                f"quadrature not converged: entries moved by {change:.3g} between "
                f"orders {check_order} and {order}"
            )
    return sp.csr_matrix(mat)


@dataclass(frozen=True)
class TranslationCheck:
    estimate: float
    exact: float
    std_error: float
    samples: int

    @property
    def relative_error(self):
        return abs(self.estimate - self.exact) / abs(self.exact)

    @property
    def z_score(self):
        if self.std_error == 0:
            return 0.0 if self.estimate == self.exact else np.inf
        return abs(self.estimate - self.exact) / self.std_error


def translation_density_check(basis, x, coeffs, samples=100_000, seed=0):
    """Monte Carlo check of the translated-Gaussian density.

    Estimates ``E[|p(z - x)|**2 exp(Re<x, z> - |x|**2/2)]`` for ``z`` drawn
    from the Gaussian measure and compares it with ``||p||**2``, the exact
    value of ``E[|p(z)|**2]``.
    """
    x = as_mode_vector(x, basis.n_modes)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    n = basis.n_modes
    z = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    shifted = z - x
    vals = np.empty(samples)
    for lo in range(0, samples, 4096):
        vals[lo:lo + 4096] = np.abs(monomials(basis, shifted[lo:lo + 4096]) @ coeffs) ** 2
    weight = np.exp((z @ np.conj(x)).real - np.vdot(x, x).real / 2)
    terms = vals * weight
    return TranslationCheck(
        estimate=float(terms.mean()),
        exact=float(np.vdot(coeffs, coeffs).real),
        std_error=float(terms.std(ddof=1) / np.sqrt(samples)),
        samples=samples,
    )
