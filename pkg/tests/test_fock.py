from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bosefock import CapacityError, OccupationIndex, TruncatedBasis, enumerate_basis
from bosefock.fock import (
    annihilation_matrix,
    annihilation_smeared,
    basis_vector,
    compressed_norm,
    creation_matrix,
    creation_smeared,
    level_projection,
    mode_inner,
    mode_projection,
    number_operator,
    permanent,
    symmetric_inner,
    symmetric_product_state,
    vacuum,
)


@pytest.mark.parametrize("n, d, dim", [(1, 0, 1), (2, 2, 6), (3, 4, 35), (4, 7, comb(11, 4))])
def test_dimension(n, d, dim):
    assert enumerate_basis(n, d).dim == dim


def test_graded_order_two_modes():
    basis = TruncatedBasis(2, 2)
    assert [basis.unrank(i) for i in range(6)] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert basis.rank((0, 0)) == 0


@given(st.integers(1, 4), st.integers(0, 6))
def test_rank_unrank_bijection(n, d):
    basis = TruncatedBasis(n, d)
    assert all(basis.rank(basis.unrank(i)) == i for i in range(basis.dim))
    assert np.array_equal(basis.rank_many(basis.occupations), np.arange(basis.dim))


def test_levels_are_contiguous():
    basis = TruncatedBasis(3, 5)
    for k in range(6):
        assert np.all(basis.levels[basis.level_slice(k)] == k)


def test_occupation_index():
    a = OccupationIndex((2, 1, 0, 0))
    assert a.occupations == (2, 1)
    assert a.level == 3
    assert a.padded(3) == (2, 1, 0)
    assert TruncatedBasis(3, 4).rank(a) == TruncatedBasis(3, 4).rank((2, 1, 0))
    with pytest.raises(ValueError):
        OccupationIndex((1, -1))
    with pytest.raises(ValueError):
        a.padded(1)


@pytest.mark.parametrize(
    "alpha, exc", [((3, 0), ValueError), ((1, 0, 1), ValueError), ((-1, 0), ValueError)]
)
def test_rank_errors(alpha, exc):
    with pytest.raises(exc):
        TruncatedBasis(2, 2).rank(alpha)


def test_unrank_out_of_range():
    with pytest.raises(IndexError):
        TruncatedBasis(2, 2).unrank(6)


def test_capacity_guard():
    with pytest.raises(CapacityError, match="limit"):
        TruncatedBasis(10, 30)
    with pytest.raises(ValueError):
        TruncatedBasis(0, 3)


def test_basis_is_read_only():
    basis = TruncatedBasis(2, 3)
    with pytest.raises(ValueError):
        basis.occupations[0, 0] = 5
    assert basis == TruncatedBasis(2, 3) and hash(basis) == hash(TruncatedBasis(2, 3))


def test_ladder_examples():
    basis = TruncatedBasis(2, 4)
    a0, c0 = annihilation_matrix(basis, 0), creation_matrix(basis, 0)
    assert np.allclose(c0 @ vacuum(basis), basis_vector(basis, (1, 0)))
    assert np.allclose(c0 @ basis_vector(basis, (2, 0)), np.sqrt(3) * basis_vector(basis, (3, 0)))
    assert not np.any(a0 @ vacuum(basis))
    # the cutoff level is annihilated by creation
    assert not np.any(c0 @ basis_vector(basis, (2, 2)))


@pytest.mark.parametrize("n, d", [(1, 8), (2, 6), (3, 5)])
def test_ccr_below_edge(n, d):
    basis = TruncatedBasis(n, d)
    eye = np.eye(basis.dim)
    for i in range(n):
        for j in range(n):
            comm = (annihilation_matrix(basis, i) @ creation_matrix(basis, j)
                    - creation_matrix(basis, j) @ annihilation_matrix(basis, i)).toarray()
            assert compressed_norm(basis, comm - (i == j) * eye, d - 1) <= 1e-12


@pytest.mark.parametrize("n, d", [(2, 5), (3, 4)])
def test_grading(n, d):
    basis = TruncatedBasis(n, d)
    for j in range(n):
        c = creation_matrix(basis, j).tocoo()
        assert np.all(basis.levels[c.row] == basis.levels[c.col] + 1)
        a = annihilation_matrix(basis, j).tocoo()
        assert np.all(basis.levels[a.row] == basis.levels[a.col] - 1)


def test_smeared_operators():
    basis = TruncatedBasis(2, 3)
    assert (creation_smeared(basis, [1.0]) != creation_matrix(basis, 0)).nnz == 0
    c = np.array([1.0, 1j]) / np.sqrt(2)
    comm = (annihilation_smeared(basis, c) @ creation_smeared(basis, c)
            - creation_smeared(basis, c) @ annihilation_smeared(basis, c)).toarray()
    assert compressed_norm(basis, comm - np.eye(basis.dim), 2) <= 1e-12
    assert np.allclose(creation_smeared(basis, 2 * c).toarray(), 2 * creation_smeared(basis, c).toarray())
    # annihilation is antilinear in its argument
    assert np.allclose(annihilation_smeared(basis, 1j * c).toarray(),
                       -1j * annihilation_smeared(basis, c).toarray())


def test_number_operator():
    basis = TruncatedBasis(3, 4)
    n = sum(creation_matrix(basis, j) @ annihilation_matrix(basis, j) for j in range(3))
    assert np.allclose(n.toarray(), number_operator(basis).toarray())


def test_projections():
    basis = TruncatedBasis(2, 1)
    assert np.array_equal(mode_projection(basis, 1).diagonal(), [1, 1, 0])
    assert np.array_equal(mode_projection(basis, 2).diagonal(), [1, 1, 1])
    p = mode_projection(TruncatedBasis(3, 3), 2)
    assert (p @ p != p).nnz == 0
    assert np.array_equal(level_projection(TruncatedBasis(2, 2), 1).diagonal(), [1, 1, 1, 0, 0, 0])
    with pytest.raises(ValueError):
        mode_projection(basis, 3)


def test_symmetric_product_state():
    basis = TruncatedBasis(2, 3)
    assert np.allclose(symmetric_product_state(basis, []), vacuum(basis))
    assert np.allclose(symmetric_product_state(basis, [[1.0]]), basis_vector(basis, (1,)))
    assert np.allclose(symmetric_product_state(basis, [[1.0], [1.0]]), basis_vector(basis, (2,)))


def test_symmetric_inner_examples():
    h1, h2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert symmetric_inner([h1, h1], [h1, h1]) == pytest.approx(2.0)
    assert symmetric_inner([h1, h2], [h2, h1]) == pytest.approx(1.0)
    f, g = np.array([1.0, 2j]), np.array([0.5, 1.0])
    assert symmetric_inner([f], [g]) == pytest.approx(mode_inner(f, g))


def test_symmetric_inner_matches_states(rng):
    basis = TruncatedBasis(3, 4)
    fs = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(3)]
    gs = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(3)]
    direct = 6 * np.vdot(symmetric_product_state(basis, gs), symmetric_product_state(basis, fs))
    assert symmetric_inner(fs, gs) == pytest.approx(direct, rel=1e-12)


vec = st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
               min_size=2, max_size=2).map(np.array)


@given(st.lists(st.tuples(vec, vec), min_size=1, max_size=4), st.randoms())
def test_symmetric_inner_symmetries(pairs, random):
    fs = [f for f, _ in pairs]
    gs = [g for _, g in pairs]
    base = symmetric_inner(fs, gs)
    tol = 1e-9 * (1 + abs(base))
    assert abs(symmetric_inner(gs, fs) - np.conj(base)) <= tol
    perm = list(range(len(fs)))
    random.shuffle(perm)
    assert abs(symmetric_inner([fs[i] for i in perm], gs) - base) <= tol
    assert abs(symmetric_inner(fs, [gs[i] for i in perm]) - base) <= tol


def test_permanent_capacity():
    with pytest.raises(CapacityError):
        permanent(np.ones((21, 21)))
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)))
