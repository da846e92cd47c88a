import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from src.linalg.fp import (
    FpSubspace,
    ensure_dimension,
    dot_mod,
    ensure_prime,
    inverse,
    matrix_power,
    null_space,
    permutation_matrix,
    rank,
    rref,
)
from src.utils.exceptions import ParameterError, ResourceError, StructuralError

PRIMES = st.sampled_from([2, 3, 5, 7])


@st.composite
def matrices(draw, max_side=5):
    p = draw(PRIMES)
    rows = draw(st.integers(1, max_side))
    cols = draw(st.integers(1, max_side))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=rows * cols, max_size=rows * cols))
    return p, np.array(entries, dtype=np.int64).reshape(rows, cols)


def test_ensure_prime_rejects_composites():
    assert ensure_prime(7) == 7
    with pytest.raises(ParameterError):
        ensure_prime(9)


def test_ensure_dimension_respects_cap(small_caps):
    ensure_dimension(8)
    with pytest.raises(ResourceError) as info:
        ensure_dimension(9, 'test space')
    assert info.value.required == 9
    assert info.value.cap == 8


def test_rref_normalises_pivots():
    reduced, pivots = rref(np.array([[2, 1, 0], [1, 2, 1]]), 3)
    assert pivots == [0, 2]
    assert reduced.tolist() == [[1, 2, 0], [0, 0, 1]]


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(StructuralError):
        inverse(np.array([[1, 2], [2, 4]]), 5)


def test_inverse_round_trip():
    mat = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert np.array_equal(mat @ inverse(mat, 5) % 5, np.eye(3, dtype=np.int64))


def test_matrix_power_of_unipotent():
    shift = np.array([[1, 1], [0, 1]])
    assert matrix_power(shift, 3, 3).tolist() == [[1, 0], [0, 1]]


def test_permutation_matrix_moves_basis_vectors():
    perm = [2, 0, 1]
    mat = permutation_matrix(perm)
    for x, image in enumerate(perm):
        e = np.zeros(3, dtype=np.int64)
        e[x] = 1
        assert (mat @ e)[image] == 1


@given(matrices())
@hypothesis_settings(max_examples=60, deadline=None)
def test_rank_nullity(case):
    p, mat = case
    kernel = null_space(mat, p)
    assert rank(mat, p) + kernel.shape[0] == mat.shape[1]
    if kernel.size:
        assert not np.any(mat @ kernel.T % p)


def test_subspace_equality_ignores_spanning_set():
    first = FpSubspace([[1, 0, 0], [0, 1, 0]], 3, 3)
    second = FpSubspace([[1, 1, 0], [2, 1, 0], [1, 2, 0]], 3, 3)
    assert first == second
    assert hash(first) == hash(second)


def test_subspace_sum_and_intersection():
    first = FpSubspace([[1, 0, 0], [0, 1, 0]], 3, 3)
    second = FpSubspace([[0, 1, 0], [0, 0, 1]], 3, 3)
    assert (first + second) == FpSubspace.full(3, 3)
    meet = first.intersection(second)
    assert meet == FpSubspace([[0, 1, 0]], 3, 3)
    assert meet.is_subspace_of(first) and meet.is_subspace_of(second)


def test_intersection_with_zero():
    assert FpSubspace.full(5, 4).intersection(FpSubspace.zero(5, 4)).dim == 0


def test_quotient_coordinates_vanish_on_subspace():
    sub = FpSubspace([[1, 1, 0]], 2, 3)
    assert not np.any(sub.quotient_coordinates([[1, 1, 0]]))
    assert sub.quotient_coordinates(np.eye(3, dtype=np.int64)).shape == (3, 2)


def test_invariance_under_action():
    line = FpSubspace([[1, 1]], 3, 2)
    swap = np.array([[0, 1], [1, 0]])
    shear = np.array([[1, 1], [0, 1]])
    assert line.is_invariant(swap)
    assert not line.is_invariant(shear)


def test_mismatched_ambient_spaces_are_rejected():
    with pytest.raises(ParameterError):
        FpSubspace.full(3, 2) + FpSubspace.full(3, 3)


@given(matrices(max_side=7))
@hypothesis_settings(max_examples=60, deadline=None)
def test_rank_matches_rref_pivots(case):
    p, mat = case
    _, pivots = rref(mat, p)
    assert rank(mat, p) == len(pivots)
    assert rank(mat.T, p) == len(pivots)


def test_dot_mod_matches_integer_product():
    rng = np.random.default_rng(3)
    left = rng.integers(0, 7, size=(4, 30))
    right = rng.integers(0, 7, size=(30, 5))
    assert np.array_equal(dot_mod(left, right, 7), left @ right % 7)
    assert dot_mod(left[0], right, 7).shape == (5,)
