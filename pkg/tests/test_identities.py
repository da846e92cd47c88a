import pytest

from src.groups.identities import (
    conjugate_H_to_T,
    intersection_rotations,
    verify_intersection_identity,
    verify_product_identity,
)
from src.groups.level import LevelContext
from src.utils.exceptions import ParameterError


def test_product_identity_odd_prime():
    assert verify_product_identity(3, 2, LevelContext(3, 4))


def test_identities_reject_small_j():
    with pytest.raises(ParameterError):
        verify_product_identity(2, 1, LevelContext(3, 4))
    with pytest.raises(ParameterError):
        verify_intersection_identity(2, 1, LevelContext(3, 4))


def test_identities_need_a_faithful_level():
    with pytest.raises(ParameterError):
        verify_product_identity(3, 2, LevelContext(3, 3))


def test_conjugates_collapse_for_p_2():
    # At p = 2 both conjugates coincide with T(l,j), so neither identity can hold.
    ctx = LevelContext(2, 5)
    assert not verify_product_identity(4, 2, ctx)
    assert not verify_intersection_identity(4, 2, ctx)


def test_intersection_rotations_cover_all_three_groups():
    rotations = intersection_rotations(3, 2, LevelContext(3, 4))
    assert sorted(rotations) == ["T(3,2)", "T(3,2)'", "T(3,2)''"]
    assert all(value is True for value in rotations.values())


@pytest.mark.parametrize('l, j, N', [(3, 2, 4), (4, 2, 5), (4, 3, 5)])
def test_identities_hold_for_p_3(l, j, N):
    ctx = LevelContext(3, N)
    assert all(intersection_rotations(l, j, ctx).values())
    assert verify_intersection_identity(l, j, ctx)
    assert verify_product_identity(l, j, ctx)


@pytest.mark.parametrize('l, j, N', [(3, 2, 4), (4, 2, 5), (4, 3, 5)])
def test_every_rotation_fails_for_p_2(l, j, N):
    # The conjugates coincide with T(l,j), and T(l,j) is strictly larger than T(l,j-1).
    ctx = LevelContext(2, N)
    rotations = intersection_rotations(l, j, ctx)
    assert len(rotations) == 3
    assert not any(rotations.values())
    assert not verify_product_identity(l, j, ctx)


def test_conjugate_H_to_T_trivial_shift():
    report = conjugate_H_to_T(1, LevelContext(3, 3))
    assert report.shift == 0
    assert report.level == 3
    assert report


def test_conjugate_H_to_T_loses_levels():
    report = conjugate_H_to_T(3, LevelContext(3, 4))
    assert report.level == 3
    assert report.holds


def test_conjugate_H_to_T_needs_odd_k():
    with pytest.raises(ParameterError):
        conjugate_H_to_T(2, LevelContext(3, 4))
