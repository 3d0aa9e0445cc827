"""Truncated symmetric Fock space: graded occupation basis and ladder operators.

States are 1-D complex numpy arrays indexed by the basis; operators are
``scipy.sparse.csr_matrix`` instances over the same basis. Modes are 0-based.

The basis holds every occupation vector ``alpha`` over ``n_modes`` modes with
total level ``sum(alpha) <= max_level``. Levels are contiguous slices (graded
order); inside a level the order is descending lexicographic, so for two modes
and cutoff 2 the order is 00, 10, 01, 20, 11, 02.

Ladder normalization is ``adag_j |alpha> = sqrt(alpha_j + 1) |alpha + e_j>``.
Creation on a level-``max_level`` state returns zero (truncation edge).
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import CapacityError

DEFAULT_MAX_DIM = 5_000_000
MAX_PERMANENT_SIZE = 20


@dataclass(frozen=True)
class OccupationIndex:
    """Per-mode particle counts with trailing zeros stripped."""

    occupations: tuple

    def __post_init__(self):
        occ = tuple(int(a) for a in self.occupations)
        if any(a < 0 for a in occ):
            raise ValueError(f"negative occupation in {occ}")
        while occ and occ[-1] == 0:
            occ = occ[:-1]
        object.__setattr__(self, "occupations", occ)

    @property
    def level(self):
        return sum(self.occupations)

    def padded(self, n_modes):
        if len(self.occupations) > n_modes:
            raise ValueError(f"{self.occupations} does not fit in {n_modes} modes")
        return self.occupations + (0,) * (n_modes - len(self.occupations))


def basis_dimension(n_modes, max_level):
    return comb(n_modes + max_level, max_level)


def _level_block(level, n_modes):
    @lru_cache(maxsize=None)
    def block(k, m):
        if m == 1:
            return np.array([[k]], dtype=np.int64)
        parts = []
        for first in range(k, -1, -1):
            rest = block(k - first, m - 1)
            parts.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
        return np.vstack(parts)

    return block(level, n_modes)


class TruncatedBasis:
    """Graded occupation basis with a rank/unrank bijection.

    Attributes
    ----------
    n_modes, max_level, dim : int
    occupations : ndarray, shape (dim, n_modes)
        Row ``i`` is the occupation vector of basis index ``i``.
    levels : ndarray, shape (dim,)
    level_offsets : ndarray, shape (max_level + 2,)
        Level ``k`` occupies ``level_offsets[k]:level_offsets[k + 1]``.
    raise_table : ndarray, shape (dim, n_modes)
        Index of ``alpha + e_j``, or -1 at the truncation edge.
    """

    def __init__(self, n_modes, max_level, max_dim=DEFAULT_MAX_DIM):
        n_modes = int(n_modes)
        max_level = int(max_level)
        if n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {n_modes}")
        if max_level < 0:
            raise ValueError(f"max_level must be >= 0, got {max_level}")
        dim = basis_dimension(n_modes, max_level)
        if dim > max_dim:
            raise CapacityError(
                f"basis with {n_modes} modes and cutoff {max_level} has {dim} states "
                f"(limit {max_dim})"
            )
        self.n_modes = n_modes
        self.max_level = max_level
        self.dim = dim

        self._binom = np.array(
            [[comb(a, b) for b in range(n_modes + 1)] for a in range(n_modes + max_level + 2)],
            dtype=np.int64,
        )
        occ = np.vstack([_level_block(k, n_modes) for k in range(max_level + 1)])
        self.occupations = occ
        self.levels = occ.sum(axis=1)
        self.level_offsets = np.array(
            [self._binom[k + n_modes - 1, n_modes] if k > 0 else 0 for k in range(max_level + 2)],
            dtype=np.int64,
        )

        up = np.full((dim, n_modes), -1, dtype=np.int64)
        below = self.levels < max_level
        for j in range(n_modes):
            raised = occ[below].copy()
            raised[:, j] += 1
            up[below, j] = self.rank_many(raised)
        self.raise_table = up

        # parent of alpha: remove one particle from its last occupied mode
        pmode = np.zeros(dim, dtype=np.int64)
        parent = np.zeros(dim, dtype=np.int64)
        if dim > 1:
            nz = occ[1:] > 0
            last = n_modes - 1 - np.argmax(nz[:, ::-1], axis=1)
            lowered = occ[1:].copy()
            lowered[np.arange(dim - 1), last] -= 1
            pmode[1:] = last
            parent[1:] = self.rank_many(lowered)
        self.parent = parent
        self.parent_mode = pmode

        for arr in (self.occupations, self.levels, self.level_offsets, self.raise_table,
                    self.parent, self.parent_mode, self._binom):
            arr.setflags(write=False)

    def __repr__(self):
        return f"TruncatedBasis(n_modes={self.n_modes}, max_level={self.max_level}, dim={self.dim})"

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedBasis)
            and self.n_modes == other.n_modes
            and self.max_level == other.max_level
        )

    def __hash__(self):
        return hash((self.n_modes, self.max_level))

    def level_slice(self, k):
        return slice(int(self.level_offsets[k]), int(self.level_offsets[k + 1]))

    def rank_many(self, alphas):
        """Vectorized rank of an ``(m, n_modes)`` integer array (no range checks)."""
        alphas = np.asarray(alphas, dtype=np.int64)
        n = self.n_modes
        k = alphas.sum(axis=1)
        idx = np.where(k > 0, self._binom[np.maximum(k + n - 1, 0), n], 0)
        rem = k.copy()
        for j in range(n - 1):
            m = n - j - 1
            d = rem - alphas[:, j]
            idx = idx + np.where(d >= 1, self._binom[np.maximum(d - 1 + m, 0), m], 0)
            rem = d
        return idx

    def rank(self, alpha):
        if isinstance(alpha, OccupationIndex):
            alpha = alpha.padded(self.n_modes)
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) > self.n_modes:
            if any(alpha[self.n_modes:]):
                raise ValueError(f"{alpha} occupies modes beyond {self.n_modes}")
            alpha = alpha[: self.n_modes]
        alpha = alpha + (0,) * (self.n_modes - len(alpha))
        if any(a < 0 for a in alpha):
            raise ValueError(f"negative occupation in {alpha}")
        if sum(alpha) > self.max_level:
            raise ValueError(f"{alpha} has level {sum(alpha)} > cutoff {self.max_level}")
        return int(self.rank_many(np.array([alpha]))[0])

    def unrank(self, index):
        index = int(index)
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} out of range for dimension {self.dim}")
        return tuple(int(a) for a in self.occupations[index])


def enumerate_basis(n_modes, max_level, max_dim=DEFAULT_MAX_DIM):
    return TruncatedBasis(n_modes, max_level, max_dim=max_dim)


def as_mode_vector(c, n_modes):
    """Complex coefficient vector padded with zeros to ``n_modes`` entries."""
    c = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    if c.ndim != 1:
        raise ValueError("mode vector must be one-dimensional")
    if len(c) > n_modes:
        raise ValueError(f"mode vector of length {len(c)} exceeds {n_modes} modes")
    out = np.zeros(n_modes, dtype=np.complex128)
    out[: len(c)] = c
    return out


def basis_vector(basis, alpha):
    v = np.zeros(basis.dim, dtype=np.complex128)
    v[basis.rank(alpha)] = 1.0
    return v


def vacuum(basis):
    v = np.zeros(basis.dim, dtype=np.complex128)
    v[0] = 1.0
    return v


def _check_mode(basis, j):
    if not 0 <= j < basis.n_modes:
        raise ValueError(f"mode {j} out of range for {basis.n_modes} modes")


def creation_matrix(basis, j):
    _check_mode(basis, j)
    rows = basis.raise_table[:, j]
    keep = rows >= 0
    cols = np.nonzero(keep)[0]
    data = np.sqrt(basis.occupations[keep, j] + 1.0).astype(np.complex128)
    return sp.csr_matrix((data, (rows[keep], cols)), shape=(basis.dim, basis.dim))


def annihilation_matrix(basis, j):
    return creation_matrix(basis, j).conj().T.tocsr()


def creation_smeared(basis, c):
    """``sum_j c_j adag_j``; linear in ``c``."""
    c = as_mode_vector(c, basis.n_modes)
    out = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for j in np.nonzero(c)[0]:
        out = out + c[j] * creation_matrix(basis, j)
    return out.tocsr()


def annihilation_smeared(basis, c):
    """Adjoint of :func:`creation_smeared`; antilinear in ``c``."""
    return creation_smeared(basis, c).conj().T.tocsr()


def number_operator(basis):
    return sp.diags(basis.levels.astype(np.complex128), format="csr")


def mode_projection(basis, m):
    """Diagonal projection onto states that leave modes ``m, m+1, ...`` empty."""
    if not 1 <= m <= basis.n_modes:
        raise ValueError(f"m must be in 1..{basis.n_modes}, got {m}")
    keep = ~np.any(basis.occupations[:, m:] > 0, axis=1)
    return sp.diags(keep.astype(np.complex128), format="csr")


def level_projection(basis, level):
    keep = basis.levels <= level
    return sp.diags(keep.astype(np.complex128), format="csr")


def compressed_norm(basis, op, level):
    """Spectral norm of ``P op P`` with ``P`` the projection onto levels ``<= level``."""
    stop = int(basis.level_offsets[min(level, basis.max_level) + 1])
    block = op[:stop, :stop]
    block = block.toarray() if sp.issparse(block) else np.asarray(block)
    if block.size == 0:
        return 0.0
    return float(np.linalg.norm(block, 2))


def symmetric_product_state(basis, vectors):
    """``(m!)^{-1/2} adag(f_1) ... adag(f_m) |vacuum>``."""
    m = len(vectors)
    if m > basis.max_level:
        raise ValueError(f"{m} factors exceed cutoff {basis.max_level}")
    state = vacuum(basis)
    for f in reversed(vectors):
        state = creation_smeared(basis, f) @ state
    return state / np.sqrt(float(factorial(m)))


def permanent(matrix, backend=None):
    """Permanent by Ryser's formula with Gray-code column updates."""
    a = np.ascontiguousarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_PERMANENT_SIZE:
        raise CapacityError(f"permanent of size {a.shape[0]} exceeds {MAX_PERMANENT_SIZE}")
    impl = kernels if backend is None else kernels.get_backend(backend)
    return impl.permanent(a)


def mode_inner(f, g):
    """``<f, g> = sum_j f_j conj(g_j)`` (linear in the first argument)."""
    return complex(np.vdot(np.asarray(g, dtype=np.complex128), np.asarray(f, dtype=np.complex128)))


def symmetric_inner(fs, gs):
    """``m! <P+(f_1 x ... x f_m), P+(g_1 x ... x g_m)>`` as a Gram permanent."""
    if len(fs) != len(gs):
        raise ValueError(f"list lengths differ: {len(fs)} vs {len(gs)}")
    if not fs:
        return 1.0 + 0.0j
    n = max(len(np.atleast_1d(v)) for v in list(fs) + list(gs))
    F = np.array([as_mode_vector(f, n) for f in fs])
    G = np.array([as_mode_vector(g, n) for g in gs])
    gram = F @ G.conj().T
    return permanent(gram)
