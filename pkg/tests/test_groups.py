import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from src.groups.level import GroupElement, LevelContext, conjugate, inverse, multiply
from src.groups.matrices import decode, encode, multiply_rows
from src.groups.subgroups import (
    SubgroupRealization,
    SubgroupSpec,
    ambient_group,
    conjugate_realization,
    coset_labels,
    coset_representatives,
    generator_rows,
    index,
    intersection,
    iter_level_specs,
    join,
    principal_level,
    realize,
    reduced_right_cosets,
    same_subgroup,
)
from src.utils.exceptions import (
    ContainmentError,
    DomainError,
    LevelContextError,
    ParameterError,
    ResourceError,
)


def test_context_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        LevelContext(4, 2)
    with pytest.raises(ParameterError):
        LevelContext(3, 0)
    with pytest.raises(ParameterError):
        LevelContext(3, 2).check_level(3)


def test_multiply_unipotents(ctx_3_3):
    product = multiply(ctx_3_3.upper(3), ctx_3_3.lower(3))
    assert product.entries == (10, 3, 3, 1)


def test_determinant_is_checked(ctx_3_2):
    with pytest.raises(DomainError):
        ctx_3_2.element(2, 0, 0, 2)


def test_mixed_contexts_do_not_multiply(ctx_3_2, ctx_3_3):
    with pytest.raises(LevelContextError):
        multiply(ctx_3_2.upper(3), ctx_3_3.upper(3))


def test_inverse_and_conjugate(ctx_3_3):
    g = ctx_3_3.element(4, 3, 9, 7)
    assert multiply(g, inverse(g)) == ctx_3_3.identity()
    h = ctx_3_3.lower(3)
    assert conjugate(g, h) == g @ h @ inverse(g)


def test_principal_membership(ctx_3_3):
    assert ctx_3_3.upper(9).in_principal(2)
    assert not ctx_3_3.upper(3).in_principal(2)


def test_encode_decode_round_trip(ctx_3_2):
    rows = realize(SubgroupSpec.G(1), ctx_3_2).table.rows
    assert np.array_equal(decode(encode(rows, 9), 9, 4), rows)


@pytest.mark.parametrize('p, N', [(2, 3), (3, 2), (3, 3)])
def test_level_family_orders(p, N):
    ctx = LevelContext(p, N)
    for spec in iter_level_specs(ctx):
        assert realize(spec, ctx).order == spec.expected_order(ctx), spec.label


@pytest.mark.parametrize('p, N', [(2, 3), (3, 3)])
def test_conjugate_family_orders(p, N):
    ctx = LevelContext(p, N)
    for l in range(2, N + 1):
        for j in range(1, l):
            for spec in (SubgroupSpec.tlj_prime(l, j), SubgroupSpec.tlj_double_prime(l, j)):
                assert realize(spec, ctx).order == p ** (3 * (N - l) + j), spec.label


def test_ambient_group_order(ctx_3_2):
    assert ambient_group(ctx_3_2).order == 27


def test_conjugates_need_positive_j(ctx_3_3):
    with pytest.raises(ParameterError):
        SubgroupSpec.tlj_prime(2, 0).validate(ctx_3_3)
    with pytest.raises(ParameterError):
        SubgroupSpec.tlj(2, 2).validate(ctx_3_3)


def test_labels():
    assert SubgroupSpec.G(2).label == 'G(p^2)'
    assert SubgroupSpec.tlj_prime(3, 2).label == "T(3,2)'"


def test_tlj_endpoints(ctx_3_3):
    assert same_subgroup(realize(SubgroupSpec.tlj(2, 0), ctx_3_3), realize(SubgroupSpec.G(2), ctx_3_3))
    assert same_subgroup(realize(SubgroupSpec.tlj(2, 1), ctx_3_3), realize(SubgroupSpec.T(2), ctx_3_3))


def test_indices(ctx_3_2, ctx_2_3):
    G = realize(SubgroupSpec.G(1), ctx_3_2)
    assert index(realize(SubgroupSpec.G(2), ctx_3_2), G) == 27
    assert index(G, G) == 1
    assert index(realize(SubgroupSpec.T(2), ctx_3_2), G) == 9
    assert index(realize(SubgroupSpec.T(2), ctx_2_3), realize(SubgroupSpec.G(1), ctx_2_3)) == 4


def test_index_of_non_subgroup_raises(ctx_3_2):
    with pytest.raises(ContainmentError):
        index(realize(SubgroupSpec.G(1), ctx_3_2), realize(SubgroupSpec.G(2), ctx_3_2))


@pytest.mark.parametrize('k', [1, 2, 3])
def test_H_has_index_p_to_k_minus_one(ctx_3_3, k):
    G = ambient_group(ctx_3_3)
    assert index(realize(SubgroupSpec.H(k), ctx_3_3), G) == 3 ** (k - 1)


def test_torus_contains_minus_one_for_p_2(ctx_2_3):
    minus_one = ctx_2_3.element(-1, 0, 0, -1).as_row()
    assert realize(SubgroupSpec.T(1), ctx_2_3).contains_rows(minus_one)


def test_enumeration_cap(small_caps, ctx_3_2):
    spec = SubgroupSpec.G(1)
    fresh = SubgroupRealization(spec.label, ctx_3_2, generator_rows(spec, ctx_3_2), spec.expected_order(ctx_3_2))
    with pytest.raises(ResourceError):
        fresh.table


def test_join_and_intersection(ctx_3_3):
    H = realize(SubgroupSpec.H(2), ctx_3_3)
    HT = realize(SubgroupSpec.HT(2), ctx_3_3)
    assert same_subgroup(join(H, HT), ambient_group(ctx_3_3))
    assert same_subgroup(intersection(H, HT), realize(SubgroupSpec.T(2), ctx_3_3))


def test_mixed_context_join_raises(ctx_3_2, ctx_3_3):
    with pytest.raises(LevelContextError):
        join(realize(SubgroupSpec.G(1), ctx_3_2), realize(SubgroupSpec.G(1), ctx_3_3))


def test_conjugation_preserves_order(ctx_3_3):
    sub = realize(SubgroupSpec.T(2), ctx_3_3)
    conjugated = conjugate_realization(sub, ctx_3_3.upper(3))
    assert conjugated.order == sub.order


@pytest.mark.parametrize('side', ['left', 'right'])
def test_coset_count_matches_index(ctx_3_3, side):
    G = ambient_group(ctx_3_3)
    sub = realize(SubgroupSpec.H(3), ctx_3_3)
    count, labels = coset_labels(G, sub, side)
    assert count == 9
    assert labels.shape == (G.order,)
    assert coset_representatives(G, sub, side).shape == (9, 4)


def test_coset_side_is_validated(ctx_3_2):
    G = ambient_group(ctx_3_2)
    with pytest.raises(ParameterError):
        coset_labels(G, G, 'middle')


def test_principal_level(ctx_3_3):
    assert principal_level(realize(SubgroupSpec.G(1), ctx_3_3)) == 1
    assert principal_level(realize(SubgroupSpec.T(2), ctx_3_3)) == 2
    assert principal_level(realize(SubgroupSpec.H(2), ctx_3_3)) == 2
    assert principal_level(realize(SubgroupSpec.tlj(3, 1), ctx_3_3)) == 3


def test_reduced_right_cosets(ctx_3_3):
    G = ambient_group(ctx_3_3)
    cosets = reduced_right_cosets(G, realize(SubgroupSpec.H(2), ctx_3_3))
    assert cosets.level == 2
    assert cosets.quotient_size == 27
    assert cosets.classes == 3
    assert cosets.element_labels.shape == (G.order,)
    assert np.bincount(cosets.element_labels).tolist() == [27] * 27
    for row in cosets.products:
        assert np.bincount(row, minlength=3).tolist() == [9, 9, 9]


@given(st.integers(0, 26), st.integers(0, 26), st.integers(0, 26))
@hypothesis_settings(max_examples=50, deadline=None)
def test_group_law_is_associative(i, j, k):
    ctx = LevelContext(3, 2)
    rows = realize(SubgroupSpec.G(1), ctx).table.rows
    g, h, x = (GroupElement.from_row(rows[n], ctx) for n in (i, j, k))
    assert (g @ h) @ x == g @ (h @ x)
    batch = multiply_rows(rows[i], rows[j], ctx.modulus)
    assert tuple(batch) == (g @ h).entries
