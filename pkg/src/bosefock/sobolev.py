"""Gaussian Bargmann transform on Hermite coefficients, Fock-Sobolev norms and
the level bound for degree-one Toeplitz operators.

The transform sends ``prod_j H_{a_j}(x_j)`` to ``e_alpha``, so on coefficient
arrays it is a relabeling. Derivatives ``d/dx_j`` on the real side and the
annihilation matrices ``a_j`` on the Fock side both act as
``alpha -> sqrt(alpha_j) (alpha - e_j)``, which is why Sobolev norms agree.
"""

from itertools import product
from math import factorial

import numpy as np
from numpy.polynomial import hermite_e

from .bargmann import toeplitz_linear
from .fock import annihilation_matrix

MAX_SOBOLEV_ORDER = 8


def _check_order(r):
    if not 0 <= r <= MAX_SOBOLEV_ORDER:
        raise ValueError(f"Sobolev order must be in 0..{MAX_SOBOLEV_ORDER}, got {r}")


def bargmann_transform_map(basis, coeffs):
    """State vector with the same coefficients as a Hermite expansion.

    Parameters
    ----------
    coeffs : ndarray or dict
        Either an array of shape ``(max_level + 1,) * n_modes`` indexed by
        Hermite multi-indices, or a mapping from multi-index tuples to values.

    Raises
    ------
    ValueError
        If a nonzero coefficient lies above the cutoff.
    """
    if isinstance(coeffs, dict):
        state = np.zeros(basis.dim, dtype=np.complex128)
        for alpha, value in coeffs.items():
            state[basis.rank(alpha)] += value
        return state
    c = np.asarray(coeffs, dtype=np.complex128)
    shape = (basis.max_level + 1,) * basis.n_modes
    if c.shape != shape:
        raise ValueError(f"coefficient array has shape {c.shape}, expected {shape}")
    levels = np.add.reduce(np.indices(shape), axis=0)
    if np.any(c[levels > basis.max_level]):
        raise ValueError("nonzero Hermite coefficient above the cutoff")
    return c[tuple(basis.occupations.T)]


def inverse_bargmann_transform_map(basis, state):
    """Hermite coefficient array of a state vector (inverse of :func:`bargmann_transform_map`)."""
    c = np.zeros((basis.max_level + 1,) * basis.n_modes, dtype=np.complex128)
    c[tuple(basis.occupations.T)] = state
    return c


def _level_weights(basis, p):
    p = np.asarray(p)
    return np.bincount(basis.levels, weights=np.abs(p) ** 2, minlength=basis.max_level + 1)


def chain_sums(basis, p, r):
    """``[sum over mode chains of length m of ||a_j1 ... a_jm p||**2 for m in 0..r]``.

    Propagates ``M_{m+1} = sum_j a_j M_m a_j^dagger`` from ``M_0 = p p^dagger``
    and reads the sums off as traces.
    """
    _check_order(r)
    p = np.asarray(p, dtype=np.complex128)
    ann = [annihilation_matrix(basis, j) for j in range(basis.n_modes)]
    m = np.outer(p, p.conj())
    sums = [float(np.trace(m).real)]
    for _ in range(r):
        # a (a M)^dagger = a M a^dagger for Hermitian M
        m = sum(a @ (a @ m).conj().T for a in ann)
        sums.append(float(np.trace(m).real))
    return sums


def sobolev_norm_chain(basis, p, r, include_zero=True):
    """``sum_m sqrt(chain sum of length m)`` for ``m = 0..r`` (``m >= 1`` when ``include_zero`` is false).

    The chains use ``T_{conj(e_1(z_j))} = a_j``. Without the ``m = 0`` term
    the value vanishes on constants and is only a seminorm.
    """
    sums = chain_sums(basis, p, r)
    start = 0 if include_zero else 1
    return float(sum(np.sqrt(s) for s in sums[start:]))


def sobolev_norm_level(basis, p, r):
    """``(sum_k (1 + k)**r ||Q_k p||**2)**(1/2)`` with ``Q_k`` the level projections."""
    _check_order(r)
    q = _level_weights(basis, p)
    k = np.arange(len(q))
    return float(np.sqrt(np.sum((1.0 + k) ** r * q)))


def real_side_chain_norm(coeffs, r, include_zero=True):
    """Chain norm of ``f = sum_beta c_beta prod_j H_{beta_j}(x_j)`` in the Gaussian Sobolev space.

    Works in the monic ``He`` basis of :mod:`numpy.polynomial.hermite_e`:
    derivatives are taken with ``hermeder`` and
    ``||sum b_beta He_beta||**2 = sum |b_beta|**2 beta!``. Since derivatives
    commute, the sum over ordered chains of length ``m`` is
    ``sum_{|g| = m} (m! / g!) ||d^g f||**2``.
    """
    _check_order(r)
    c = np.asarray(coeffs, dtype=np.complex128)
    n = c.ndim
    idx = np.indices(c.shape)
    fact = np.vectorize(lambda k: float(factorial(int(k))))
    beta_fact = np.prod(fact(idx), axis=0)
    b = c / np.sqrt(beta_fact)
    total = 0.0
    for m in range(0 if include_zero else 1, r + 1):
        s = 0.0
        for g in product(range(m + 1), repeat=n):
            if sum(g) != m:
                continue
            d = b
            for axis, order in enumerate(g):
                if order:
                    d = hermite_e.hermeder(d, m=order, axis=axis)
            shape_fact = beta_fact[tuple(slice(0, s_) for s_ in d.shape)]
            weight = factorial(m) / np.prod([factorial(k) for k in g])
            s += weight * float(np.sum(np.abs(d) ** 2 * shape_fact))
        total += np.sqrt(s)
    return float(total)


def falling_factorial(k, m):
    out = 1
    for i in range(m):
        out *= k - i
    return out


def sobolev_equivalence_bounds(r, max_level=1000):
    """Constants ``c1 <= chain / level <= c2`` valid for every state.

    With ``q_k = ||Q_k p||**2`` the chain norm is
    ``sum_m (sum_k k^(m) q_k)**(1/2)`` (falling factorials). Comparing
    ``sum_m k^(m)`` with ``(1 + k)**r`` over ``k`` gives
    ``c1 = min_k ratio**(1/2)`` and ``c2 = (r + 1)**(1/2) max_k ratio**(1/2)``.
    The ratio tends to one, so scanning ``k <= max_level`` together with the
    limit one covers all levels.
    """
    _check_order(r)
    ratios = [
        sum(falling_factorial(k, m) for m in range(r + 1)) / (1.0 + k) ** r
        for k in range(max_level + 1)
    ]
    lo = min(min(ratios), 1.0)
    hi = max(max(ratios), 1.0)
    return float(np.sqrt(lo)), float(np.sqrt((r + 1) * hi))


def toeplitz_level_bound_check(basis, symbol, k, tol=1e-14, max_iter=10_000):
    """Largest singular value of ``T_phi`` restricted to level ``k`` and the bound ``||phi|| sqrt(k+1)``.

    The norm comes from power iteration on ``B^dagger B`` where ``B`` is the
    block of ``T_phi`` leaving level ``k``.
    """
    if not 0 <= k < basis.max_level:
        raise ValueError(f"level {k} out of range for cutoff {basis.max_level}")
    bound = float(symbol.norm * np.sqrt(k + 1))
    target = k - 1 if symbol.conjugated else k + 1
    if target < 0:
        return 0.0, bound
    op = toeplitz_linear(basis, symbol)
    block = op[basis.level_slice(target), basis.level_slice(k)].toarray()
    gram = block.conj().T @ block
    v = np.ones(gram.shape[0], dtype=np.complex128) + 0.1j * np.arange(gram.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = gram @ v
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0, bound
        v = w / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam)), bound
