"""Quasi-free Gibbs states ``omega(A) = Tr(rho A) / Tr(rho)`` with
``rho = exp(-beta dGamma(H - mu))``: direct truncated traces and closed forms.
"""

from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.special import betainc

from .bargmann import _mode0_chains, weyl_rotation
from .fock import as_mode_vector, symmetric_inner
from .hermite import field_exponential
from .quantization import exp_neg_beta_dgamma, gamma_blocks

LAMBDA_MAX_GUARD = 0.95
MAX_PRODUCT_ORDER = 12


def tail_weight(spectrum, max_level, m_operators=0):
    """Upper bound on the thermal weight above level ``max_level - m_operators``.

    ``sum_{|alpha| > K} prod_j lambda_j**alpha_j`` is at most the
    negative-binomial tail ``I_p(K + 1, n) / (1 - p)**n`` with
    ``p = max(lambda)`` and ``K = max_level - m_operators``. For one mode this
    is ``p**(K+1) / (1 - p)``.
    """
    n = spectrum.n_modes
    if n == 0:
        return 0.0
    p = spectrum.max_lambda
    k = max_level - m_operators
    if k < 0:
        return float(1.0 / (1.0 - p) ** n)
    return float(betainc(k + 1, n, p) / (1.0 - p) ** n)


class GibbsContext:
    """Thermal state on a truncated basis.

    Parameters
    ----------
    basis : TruncatedBasis
    spectrum : ThermalSpectrum
        Must have ``max(lambda) <= 0.95``; closer to one the cutoff needed for
        a small tail is impractical.
    """

    def __init__(self, basis, spectrum):
        if spectrum.n_modes != basis.n_modes:
            raise ValueError(f"spectrum has {spectrum.n_modes} modes, basis has {basis.n_modes}")
        if spectrum.max_lambda > LAMBDA_MAX_GUARD:
            raise ValueError(
                f"largest thermal weight {spectrum.max_lambda:.4g} exceeds {LAMBDA_MAX_GUARD}; "
                "raise beta or lower mu so that the truncated trace converges at a usable cutoff"
            )
        self.basis = basis
        self.spectrum = spectrum

    @cached_property
    def rho(self):
        """Unnormalized ``exp(-beta dGamma(H - mu))``."""
        return exp_neg_beta_dgamma(self.basis, self.spectrum)

    @cached_property
    def z_truncated(self):
        """``Tr(rho)`` evaluated in the eigenmode basis, ``sum_alpha prod lambda**alpha``."""
        lam = self.spectrum.lambdas
        return float(np.prod(lam[None, :] ** self.basis.occupations, axis=1).sum())

    def truncation_tail(self, m_operators=0):
        return tail_weight(self.spectrum, self.basis.max_level, m_operators)


def partition_truncated(ctx):
    return ctx.z_truncated


def partition_closed(spectrum):
    """``prod_j 1 / (1 - lambda_j)``."""
    lam = np.asarray(spectrum.lambdas)
    if np.any(lam >= 1):
        raise ValueError("partition function diverges for lambda >= 1")
    return float(np.prod(1.0 / (1.0 - lam)))


def partition_sqrt_variant(spectrum):
    """``prod_j 1 / sqrt(1 - lambda_j)``; kept only to report its mismatch."""
    return float(np.prod(1.0 / np.sqrt(1.0 - np.asarray(spectrum.lambdas))))


def _trace_product(rho, a):
    if sp.issparse(a):
        return complex(rho.multiply(a.T).sum())
    a = np.asarray(a)
    return complex((rho.multiply(a.T)).sum())


def gibbs_expectation(ctx, a):
    """``Tr(rho A) / Tr(rho)`` on the truncated space."""
    if a.shape != (ctx.basis.dim, ctx.basis.dim):
        raise ValueError(f"operator shape {a.shape} does not match dimension {ctx.basis.dim}")
    rho = ctx.rho
    return _trace_product(rho, a) / complex(rho.diagonal().sum())


def gibbs_weyl_direct(ctx, f):
    """Truncated ``Tr(rho W(f)) / Tr(rho)`` without forming ``W(f)``.

    With ``W(f) = Gamma(R) E Gamma(R)^dagger`` (see ``weyl_operator``) the
    trace equals ``Tr(Gamma(R^dagger S R) E)``, where ``S`` is the one-body
    thermal matrix. ``Gamma(R^dagger S R)`` preserves the level and ``E``
    preserves every occupation except mode 0, so only diagonals meet.
    """
    basis = ctx.basis
    rot, theta = weyl_rotation(basis, f)
    s = rot.conj().T @ ctx.spectrum.one_body() @ rot
    weights = np.concatenate([np.diag(b) for b in gamma_blocks(basis, s)])
    e_diag = np.ones(basis.dim, dtype=np.complex128)
    if theta != 0.0:
        for size, chain in _mode0_chains(basis.n_modes, basis.max_level).items():
            e_diag[chain] = np.diag(field_exponential(size, theta))[None, :]
    return complex(weights @ e_diag / weights.sum())


def weyl_gibbs_closed(spectrum, f):
    """``exp(-(1/4) sum_j |f_j|**2 (1 + lambda_j) / (1 - lambda_j))`` in eigen-coordinates."""
    fh = spectrum.to_eigenbasis(as_mode_vector(f, spectrum.n_modes))
    lam = spectrum.lambdas
    return float(np.exp(-0.25 * np.sum(np.abs(fh) ** 2 * (1 + lam) / (1 - lam))))


def tilde_transform(spectrum, f, kind):
    """Scale eigen-components by ``lambda/sqrt(1-lambda)`` ("creation") or ``1/sqrt(1-lambda)`` ("annihilation")."""
    lam = spectrum.lambdas
    if kind == "creation":
        scale = lam / np.sqrt(1 - lam)
    elif kind == "annihilation":
        scale = 1 / np.sqrt(1 - lam)
    else:
        raise ValueError(f"kind must be 'creation' or 'annihilation', got {kind!r}")
    v = spectrum.vectors
    return v @ (scale * (v.conj().T @ as_mode_vector(f, spectrum.n_modes)))


def two_point(spectrum, f, g):
    """``omega(adag(f) a(g)) = <g, lambda (1 - lambda)**-1 f>``."""
    lam = spectrum.lambdas
    fh = spectrum.to_eigenbasis(as_mode_vector(f, spectrum.n_modes))
    gh = spectrum.to_eigenbasis(as_mode_vector(g, spectrum.n_modes))
    return complex(np.sum(np.conj(gh) * lam / (1 - lam) * fh))


def product_gibbs_closed(spectrum, fs, gs):
    """``omega(adag(f_1)..adag(f_m) a(g_1)..a(g_m))`` as a permanent of tilde inner products."""
    if len(fs) != len(gs):
        raise ValueError(f"list lengths differ: {len(fs)} vs {len(gs)}")
    if len(fs) > MAX_PRODUCT_ORDER:
        raise ValueError(f"product order {len(fs)} exceeds {MAX_PRODUCT_ORDER}")
    ft = [tilde_transform(spectrum, f, "creation") for f in fs]
    gt = [tilde_transform(spectrum, g, "annihilation") for g in gs]
    return symmetric_inner(ft, gt)
