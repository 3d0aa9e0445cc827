"""Traces three ways: diagonal sum, exact coherent-state integral, and
Monte Carlo over the Gaussian measure.

For ``x`` in the first ``m`` coordinates, ``<X K_x, K_x>`` integrated against
``(2*pi)**-m exp(-|x|**2/2) dx`` equals the diagonal sum of ``X`` over states
supported on those modes, because ``E[conj(x)**b x**a] = delta_ab 2**|a| a!``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, lgamma, log

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_norm
from scipy.special import gammaincc

from .bargmann import monomials
from .hermite import gauss_hermite

CHUNK_SIZE = 4096


@dataclass(frozen=True)
class TraceReport:
    """Result of a coherent-state trace estimate.

    ``exact`` is the diagonal sum over states supported on the sampled modes;
    ``bias_bound`` bounds the contribution of samples rejected for
    ``|x|**2 > 4 * max_level``.
    """

    exact: complex
    estimate: complex
    std_error: float
    samples: int
    rejected: int = 0
    bias_bound: float = 0.0
    seed: int = 0
    mode_sequence: list = field(default_factory=list)

    @property
    def z_score(self):
        if self.std_error == 0:
            return 0.0 if self.estimate == self.exact else np.inf
        return abs(self.estimate - self.exact) / self.std_error


def trace_exact(x):
    """Sum of diagonal entries."""
    return complex(x.diagonal().sum())


def _support_mask(basis, m_modes):
    if not 1 <= m_modes <= basis.n_modes:
        raise ValueError(f"m_modes must be in 1..{basis.n_modes}, got {m_modes}")
    return ~np.any(basis.occupations[:, m_modes:] > 0, axis=1)


def _as_dense(x):
    return x.toarray() if sp.issparse(x) else np.asarray(x, dtype=np.complex128)


def coherent_integral_moments(basis, x, m_modes):
    """``int <X K_x, K_x> dlambda_m`` from the Gaussian moment identity.

    Each entry ``X[a, b]`` contributes ``X[a, b] * E[e_a(x) conj(e_b(x))]``
    where the moment is ``prod_j delta(a_j, b_j) 2**a_j a_j!`` divided by the
    monomial normalizations.
    """
    keep = _support_mask(basis, m_modes)
    coo = sp.coo_matrix(x)
    rows, cols, vals = coo.row, coo.col, coo.data
    sel = keep[rows] & keep[cols]
    total = 0.0 + 0.0j
    occ = basis.occupations
    for r, c, v in zip(rows[sel], cols[sel], vals[sel]):
        a, b = occ[r], occ[c]
        if np.any(a != b):
            continue
        # log of 2**|a| a! / sqrt(2**|a| a! 2**|b| b!)
        log_moment = sum(k * log(2) + lgamma(k + 1) for k in a)
        log_norm = 0.5 * sum(k * log(2) + lgamma(k + 1) for k in a)
        log_norm += 0.5 * sum(k * log(2) + lgamma(k + 1) for k in b)
        total += v * np.exp(log_moment - log_norm)
    return complex(total)


def coherent_integral_quadrature(basis, x, m_modes):
    """``int <X K_x, K_x> dlambda_m`` by tensor Gauss-Hermite quadrature.

    The integrand is a polynomial of degree at most ``2 * max_level`` in each
    real coordinate, so ``max_level + 1`` nodes per axis are exact.
    """
    _support_mask(basis, m_modes)
    t, w = gauss_hermite(basis.max_level + 1)
    grids = np.meshgrid(*([t] * (2 * m_modes)), indexing="ij")
    wgrid = np.prod(np.meshgrid(*([w] * (2 * m_modes)), indexing="ij"), axis=0).ravel()
    pts = np.stack([g.ravel() for g in grids], axis=1)
    z = pts[:, 0::2] + 1j * pts[:, 1::2]
    xd = _as_dense(x)
    total = 0.0 + 0.0j
    for lo in range(0, len(z), CHUNK_SIZE):
        k = np.conj(monomials(basis, z[lo:lo + CHUNK_SIZE]))
        vals = np.sum(np.conj(k) * (k @ xd.T), axis=1)
        total += wgrid[lo:lo + CHUNK_SIZE] @ vals
    return complex(total)


def trace_mode_convergence(basis, x, modes):
    """``[(m, diagonal sum over states on the first m modes)]`` for each ``m`` in ``modes``."""
    modes = list(modes)
    if any(b < a for a, b in zip(modes, modes[1:])):
        raise ValueError("mode list must be ascending")
    diag = np.asarray(x.diagonal())
    return [(m, complex(diag[_support_mask(basis, m)].sum())) for m in modes]


def rejection_bias_bound(basis, x, m_modes, radius2=None):
    """Bound on ``|E[<X K_x, K_x> 1{|x|**2 > R}]|`` with ``R = 4 * max_level`` by default.

    Uses ``|<X K, K>| <= ||X||_F ||K||**2`` and, for ``T = |x|**2/2`` with a
    Gamma(m) law, ``E[T**k/k! 1{T > R/2}] = C(k+m-1, k) Q(k+m, R/2)``.
    """
    if radius2 is None:
        radius2 = 4.0 * basis.max_level
    fro = float(sparse_norm(x)) if sp.issparse(x) else float(np.linalg.norm(x))
    tail = sum(
        comb(k + m_modes - 1, k) * gammaincc(k + m_modes, radius2 / 2.0)
        for k in range(basis.max_level + 1)
    )
    return fro * float(tail)


def _chunk_stats(basis, xds, m_modes, seed, chunk, n, antithetic, radius2):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))
    draws = n // 2 if antithetic else n
    z = rng.standard_normal((draws, m_modes)) + 1j * rng.standard_normal((draws, m_modes))
    points = np.concatenate([z, -z]) if antithetic else z
    reject = np.sum(np.abs(points) ** 2, axis=1) > radius2
    k = np.conj(monomials(basis, points))
    out = []
    for xd in xds:
        vals = np.sum(np.conj(k) * (k @ xd.T), axis=1)
        vals[reject] = 0.0
        if antithetic:
            vals = 0.5 * (vals[:draws] + vals[draws:])
        out.append((vals.sum(), np.sum(np.abs(vals) ** 2), len(vals)))
    return out, int(reject.sum())


def trace_coherent_mc_batch(basis, ops, m_modes, samples=100_000, seed=0, workers=1,
                            antithetic=False):
    """Monte Carlo coherent-state traces for several operators on shared samples.

    Samples are drawn in fixed chunks of ``CHUNK_SIZE`` from Philox streams
    keyed by ``(seed, chunk index)`` and reduced in chunk order, so the result
    is bit-identical for any ``workers``.

    Parameters
    ----------
    basis : TruncatedBasis
    ops : sequence of operators
    m_modes : int
        Number of leading modes sampled; the estimate targets the diagonal sum
        over states supported on those modes.
    samples : int
        Number of coherent points (pairs count twice when ``antithetic``).
    seed : int
    workers : int
        Threads used for chunks.
    antithetic : bool
        Pair every point ``x`` with ``-x``; the pair mean is one sample.

    Returns
    -------
    list of TraceReport
    """
    keep = _support_mask(basis, m_modes)
    if samples < 2:
        raise ValueError("need at least two samples")
    if antithetic and samples % 2:
        raise ValueError("antithetic sampling needs an even sample count")
    xds = [_as_dense(x) for x in ops]
    radius2 = 4.0 * basis.max_level
    sizes = [min(CHUNK_SIZE, samples - lo) for lo in range(0, samples, CHUNK_SIZE)]

    def run(c):
        return _chunk_stats(basis, xds, m_modes, seed, c, sizes[c], antithetic, radius2)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(sizes))))
    else:
        results = [run(c) for c in range(len(sizes))]

    rejected = sum(r for _, r in results)
    reports = []
    for i, x in enumerate(ops):
        total, total_sq, count = 0.0 + 0.0j, 0.0, 0
        for stats, _ in results:
            s, s2, c = stats[i]
            total += s
            total_sq += s2
            count += c
        mean = total / count
        var = max(total_sq - count * abs(mean) ** 2, 0.0) / (count - 1)
        diag = np.asarray(x.diagonal())
        reports.append(
            TraceReport(
                exact=complex(diag[keep].sum()),
                estimate=complex(mean),
                std_error=float(np.sqrt(var / count)),
                samples=samples,
                rejected=rejected,
                bias_bound=rejection_bias_bound(basis, x, m_modes, radius2),
                seed=seed,
            )
        )
    return reports


def trace_coherent_mc(basis, x, m_modes, samples=100_000, seed=0, workers=1, antithetic=False):
    """Monte Carlo estimate of ``int <X K_x, K_x> dlambda_m``; see :func:`trace_coherent_mc_batch`."""
    return trace_coherent_mc_batch(basis, [x], m_modes, samples, seed, workers, antithetic)[0]
