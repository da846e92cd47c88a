from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from src.coinvariants.modules import regular_module, trivial_module
from src.groups.level import LevelContext
from src.groups.subgroups import ambient_group
from src.iwasawa.algebra import TruncatedAlgebra, monomial_basis_check, z_generators
from src.linalg.fp import FpSubspace
from src.iwasawa.ideals import (
    ideal_I_alpha,
    ideal_I_alpha_is_two_sided,
    ideal_Ip,
    is_two_sided,
    module_filtration,
    monomial_actions,
    surjection_check,
)
from src.iwasawa.monomials import (
    at_least,
    count_nonmajorizing,
    count_nonmajorizing_brute,
    count_not_below,
    graded_commutativity_check,
    ordered_indices,
    random_index_pairs,
    successor,
)
from src.utils.exceptions import ParameterError


@pytest.fixture
def algebra(ctx_3_2):
    return TruncatedAlgebra(ctx_3_2)


def test_algebra_shape(algebra):
    assert algebra.dim == 27
    assert algebra.rank == 3
    assert algebra.exponent_bound == 3
    assert algebra.base_level == 1


def test_p_2_defaults_to_the_uniform_base(ctx_2_3):
    algebra = TruncatedAlgebra(ctx_2_3)
    assert algebra.base_level == 2
    assert algebra.dim == 8
    assert algebra.monomial_basis_check()


def test_z_generators_lie_in_the_augmentation_ideal(ctx_3_2):
    for z in z_generators(ctx_3_2):
        assert z.sum() % 3 == 0
        assert np.any(z)


def test_z_generators_are_nilpotent(algebra):
    for i in range(algebra.rank):
        alpha = [0] * algebra.rank
        alpha[i] = algebra.exponent_bound
        assert not np.any(algebra.apply_monomial(alpha, algebra.one()))


def test_z_times_one(algebra):
    z0 = algebra.z_generators()[0]
    assert np.array_equal(algebra.multiply(z0, algebra.one()), z0)
    assert np.array_equal(algebra.multiply(algebra.one(), z0), z0)


@pytest.mark.parametrize('N', [2, 3])
def test_monomial_basis(N):
    assert monomial_basis_check(LevelContext(3, N))


def test_monomial_index_is_validated(algebra):
    with pytest.raises(ParameterError):
        algebra.position((3, 0, 0))
    with pytest.raises(ParameterError):
        algebra.monomial((0, 0))


def test_graded_commutativity(algebra):
    assert graded_commutativity_check((0, 0, 0), (1, 2, 0), algebra)
    assert graded_commutativity_check((1, 0, 0), (0, 1, 0), algebra)
    for alpha, beta in random_index_pairs(algebra, 20, seed=0):
        assert graded_commutativity_check(alpha, beta, algebra)


def test_order_and_successor(algebra):
    ordered = ordered_indices(algebra)
    assert ordered[:4] == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert successor((0, 0, 0), algebra) == (0, 0, 1)
    assert successor(ordered[-1], algebra) is None
    assert at_least((0, 0, 2), (1, 0, 0))
    with pytest.raises(ParameterError):
        successor((5, 0, 0), algebra)


def test_ideal_chain(algebra):
    assert ideal_I_alpha((0, 0, 0), algebra).dim == 27
    ordered = ordered_indices(algebra)
    for alpha, following in zip(ordered, ordered[1:]):
        assert ideal_I_alpha(following, algebra).is_subspace_of(ideal_I_alpha(alpha, algebra))


def test_augmentation_ideal_is_two_sided(algebra):
    ideal = ideal_I_alpha((0, 0, 1), algebra)
    assert ideal.dim == 26
    assert is_two_sided(ideal, algebra)


def test_ideal_Ip_at_level_one(algebra):
    report = ideal_Ip(1, algebra)
    assert report.codimension == 1
    assert report.matches_monomial_span
    assert not report.matches_literal_span


def test_ideal_Ip_at_top_level_is_zero(algebra):
    report = ideal_Ip(2, algebra)
    assert report.kernel.dim == 0
    assert report


def test_monomial_two_sided_check_agrees_with_subspaces(algebra):
    for alpha in ordered_indices(algebra)[:6]:
        assert ideal_I_alpha_is_two_sided(alpha, algebra) == is_two_sided(ideal_I_alpha(alpha, algebra), algebra)


@pytest.mark.parametrize('l', [1, 2])
def test_ideal_Ip_matches_explicit_span(algebra, l):
    report = ideal_Ip(l, algebra)
    threshold = algebra.p ** max(l - algebra.base_level, 0)
    rows = [algebra.monomial(alpha) for alpha in algebra.indices() if any(value >= threshold for value in alpha)]
    explicit = FpSubspace(np.array(rows).reshape(-1, algebra.dim), algebra.p, algebra.dim)
    assert report.matches_monomial_span == (report.kernel == explicit)
    assert report.codimension == algebra.dim - report.kernel.dim


def test_monomial_actions_on_the_trivial_module(ctx_3_2, algebra):
    actions = monomial_actions(trivial_module(ambient_group(ctx_3_2)), algebra)
    assert actions[(0, 0, 0)].tolist() == [[1]]
    assert all(not np.any(matrix) for alpha, matrix in actions.items() if sum(alpha))


def test_regular_module_filtration_counts_monomials(ctx_3_2, algebra):
    module = regular_module(ambient_group(ctx_3_2)).to_matrix_module()
    filtration = module_filtration(module, algebra)
    indices = algebra.indices()
    for beta in ordered_indices(algebra):
        assert filtration.steps[beta].dim == sum(1 for gamma in indices if at_least(gamma, beta))
    assert filtration.quotient_dimension((0, 0, 0)) == module.coinvariant_dimension(algebra.group)


def test_filtration_rows(ctx_3_2, algebra):
    module = trivial_module(ambient_group(ctx_3_2))
    rows = module_filtration(module, algebra).rows()
    assert rows[0] == {'index': [0, 0, 0], 'dim': 1, 'quotient_dim': 1}
    assert all(row['dim'] == 0 for row in rows[1:])


def test_surjection_identity_and_shift(ctx_3_2, algebra):
    module = regular_module(ambient_group(ctx_3_2)).to_matrix_module()
    filtration = module_filtration(module, algebra)
    assert surjection_check(module, (0, 1, 0), (0, 1, 0), algebra, filtration)
    assert surjection_check(module, (0, 0, 0), (1, 1, 0), algebra, filtration)
    with pytest.raises(ParameterError):
        surjection_check(module, (1, 0, 0), (0, 1, 0), algebra, filtration)


def test_nonmajorizing_examples():
    assert count_nonmajorizing((0, 0, 0), 2, 3).count == 0
    assert count_nonmajorizing((1, 0, 0), 1, 3).count == 9
    report = count_nonmajorizing((1, 1, 1), 2, 2)
    assert report.count == 37
    assert report.bound == 48
    assert report.holds


def test_not_below_reading():
    assert count_not_below((0, 0, 0), 1, 2) == 7
    assert count_not_below((1, 1, 1), 1, 2) == 0


@given(
    st.tuples(st.integers(0, 9), st.integers(0, 9), st.integers(0, 9)),
    st.integers(0, 2),
    st.sampled_from([2, 3]),
)
@hypothesis_settings(max_examples=60, deadline=None)
def test_nonmajorizing_closed_form(alpha, l, p):
    report = count_nonmajorizing(alpha, l, p)
    assert report.count == count_nonmajorizing_brute(alpha, l, p)
    assert report.holds


def test_nonmajorizing_rejects_negative_entries():
    with pytest.raises(ParameterError):
        count_nonmajorizing((-1, 0, 0), 1, 2)


def test_brute_force_agrees_on_a_grid():
    for alpha in product(range(4), repeat=3):
        assert count_nonmajorizing(alpha, 1, 3).count == count_nonmajorizing_brute(alpha, 1, 3)
