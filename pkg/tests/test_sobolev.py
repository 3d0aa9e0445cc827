import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bosefock import TruncatedBasis
from bosefock.bargmann import LinearSymbol
from bosefock.fock import basis_vector, vacuum
from bosefock.sobolev import (
    MAX_SOBOLEV_ORDER,
    bargmann_transform_map,
    chain_sums,
    falling_factorial,
    inverse_bargmann_transform_map,
    real_side_chain_norm,
    sobolev_equivalence_bounds,
    sobolev_norm_chain,
    sobolev_norm_level,
    toeplitz_level_bound_check,
)


def test_transform_examples(rng):
    basis = TruncatedBasis(2, 4)
    const = np.zeros((5, 5))
    const[0, 0] = 1.0
    assert np.allclose(bargmann_transform_map(basis, const), vacuum(basis))
    assert np.allclose(bargmann_transform_map(basis, {(2, 1): 1.0}), basis_vector(basis, (2, 1)))
    c = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    c[np.add.outer(np.arange(5), np.arange(5)) > 4] = 0
    p = bargmann_transform_map(basis, c)
    assert abs(np.linalg.norm(p) - np.linalg.norm(c)) <= 1e-15 * np.linalg.norm(c)
    assert np.array_equal(inverse_bargmann_transform_map(basis, p), c)


def test_transform_errors():
    basis = TruncatedBasis(2, 2)
    bad = np.zeros((3, 3))
    bad[2, 2] = 1.0
    with pytest.raises(ValueError, match="above the cutoff"):
        bargmann_transform_map(basis, bad)
    with pytest.raises(ValueError, match="shape"):
        bargmann_transform_map(basis, np.zeros((4, 4)))
    with pytest.raises(ValueError):
        bargmann_transform_map(basis, {(3, 0): 1.0})


def test_chain_norm_examples():
    basis = TruncatedBasis(1, 6)
    omega = vacuum(basis)
    assert sobolev_norm_chain(basis, omega, 2) == pytest.approx(1.0)
    assert sobolev_norm_chain(basis, omega, 2, include_zero=False) == 0.0
    e3 = basis_vector(basis, (3,))
    assert sobolev_norm_chain(basis, e3, 2) == pytest.approx(1 + np.sqrt(3) + np.sqrt(6))
    assert sobolev_norm_chain(basis, 2 * e3, 2) == pytest.approx(2 * (1 + np.sqrt(3) + np.sqrt(6)))


def test_level_norm_examples():
    basis = TruncatedBasis(1, 6)
    assert sobolev_norm_level(basis, vacuum(basis), 5) == pytest.approx(1.0)
    assert sobolev_norm_level(basis, basis_vector(basis, (3,)), 2) == pytest.approx(4.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_chain_sums_are_falling_factorials(rng, n):
    basis = TruncatedBasis(n, 8)
    for k in range(9):
        p = np.zeros(basis.dim, dtype=complex)
        sl = basis.level_slice(k)
        p[sl] = rng.standard_normal(sl.stop - sl.start)
        norm2 = np.vdot(p, p).real
        for m, s in enumerate(chain_sums(basis, p, 3)):
            assert s == pytest.approx(falling_factorial(k, m) * norm2, rel=1e-10, abs=1e-12)


def test_chain_sums_additive_across_levels(rng):
    basis = TruncatedBasis(2, 6)
    p = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
    parts = []
    for k in range(7):
        q = np.zeros_like(p)
        q[basis.level_slice(k)] = p[basis.level_slice(k)]
        parts.append(chain_sums(basis, q, 3))
    assert np.allclose(np.sum(parts, axis=0), chain_sums(basis, p, 3), rtol=1e-12)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("r", range(5))
def test_isometry(rng, n, r):
    basis = TruncatedBasis(n, 6)
    p = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
    c = inverse_bargmann_transform_map(basis, p)
    for zero in (True, False):
        fock = sobolev_norm_chain(basis, p, r, include_zero=zero)
        real = real_side_chain_norm(c, r, include_zero=zero)
        assert fock == pytest.approx(real, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("r", [0, 1, 2, 4, 8])
def test_equivalence_bounds(rng, r):
    lo, hi = sobolev_equivalence_bounds(r)
    assert 0 < lo <= 1 <= hi
    for n, d in [(1, 20), (2, 10), (3, 6)]:
        basis = TruncatedBasis(n, d)
        for _ in range(5):
            p = rng.standard_normal(basis.dim) * rng.uniform(0, 1, basis.dim) ** 4
            ratio = sobolev_norm_chain(basis, p, r) / sobolev_norm_level(basis, p, r)
            assert lo - 1e-12 <= ratio <= hi + 1e-12


def test_equivalence_bound_values():
    assert sobolev_equivalence_bounds(2) == pytest.approx((np.sqrt(0.5), np.sqrt(3)))


def test_order_guard():
    basis = TruncatedBasis(1, 3)
    with pytest.raises(ValueError):
        sobolev_norm_chain(basis, vacuum(basis), MAX_SOBOLEV_ORDER + 1)
    with pytest.raises(ValueError):
        sobolev_norm_level(basis, vacuum(basis), -1)


def test_level_bound_examples():
    basis = TruncatedBasis(1, 6)
    assert toeplitz_level_bound_check(basis, LinearSymbol([1.0]), 0) == pytest.approx((1.0, 1.0))
    assert toeplitz_level_bound_check(basis, LinearSymbol([1.0]), 3) == pytest.approx((2.0, 2.0))
    basis2 = TruncatedBasis(2, 4)
    norm, bound = toeplitz_level_bound_check(basis2, LinearSymbol(np.array([1.0, 1.0]) / np.sqrt(2)), 2)
    assert norm <= np.sqrt(3) + 1e-10 and bound == pytest.approx(np.sqrt(3))
    with pytest.raises(ValueError):
        toeplitz_level_bound_check(basis, LinearSymbol([1.0]), 6)


def test_level_bound_annihilation_side():
    basis = TruncatedBasis(1, 6)
    norm, bound = toeplitz_level_bound_check(basis, LinearSymbol([1.0], conjugated=True), 0)
    assert norm == 0.0 and bound == 1.0
    norm, _ = toeplitz_level_bound_check(basis, LinearSymbol([1.0], conjugated=True), 4)
    assert norm == pytest.approx(2.0)


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@given(st.lists(coef, min_size=3, max_size=3), st.integers(0, 5))
def test_level_bound_property(c, k):
    c = np.array(c)
    if np.linalg.norm(c) == 0:
        return
    norm, bound = toeplitz_level_bound_check(TruncatedBasis(3, 6), LinearSymbol(c), k)
    assert norm <= bound + 1e-10
