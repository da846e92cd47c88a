import numpy as np
import pytest
from sympy import Rational

from src.cosets.filtration import filtration_F
from src.groups.level import LevelContext
from src.groups.subgroups import ambient_group
from src.symmetric.lattice import (
    equivariance_check,
    integral_on_points,
    reduce_rational,
    sym_lattice_basis,
    sym_reduction,
)
from src.utils.exceptions import DomainError, ParameterError


def test_reduce_rational():
    assert reduce_rational(Rational(1, 2), 3) == 2
    with pytest.raises(DomainError):
        reduce_rational(Rational(1, 3), 3)


def test_basis_sizes(ctx_3_3):
    assert len(sym_lattice_basis(0, 3, ctx_3_3)) == 1
    assert len(sym_lattice_basis(1, 3, ctx_3_3)) == 2
    with pytest.raises(ParameterError):
        sym_lattice_basis(9, 3, ctx_3_3)


def test_constants_reduce_to_constants(ctx_3_3):
    (constant,) = sym_lattice_basis(0, 3, ctx_3_3)
    assert constant.evaluate(4, 21) == 1


def test_basis_is_integral_on_random_points(ctx_3_3):
    rng = np.random.default_rng(0)
    points = [(1 + 3 * int(a), 3 * int(c)) for a, c in rng.integers(-50, 50, size=(100, 2))]
    for function in sym_lattice_basis(3, 3, ctx_3_3):
        assert integral_on_points(function, points)


def test_integral_on_points_checks_the_domain(ctx_3_3):
    (constant,) = sym_lattice_basis(0, 3, ctx_3_3)
    with pytest.raises(DomainError):
        integral_on_points(constant, [(2, 0)])


@pytest.mark.parametrize('p, k, dmax', [(3, 3, 4), (2, 3, 3)])
def test_reduction_lands_on_the_next_filtration_step(p, k, dmax):
    ctx = LevelContext(p, k)
    previous = 0
    for d in range(dmax + 1):
        reduction = sym_reduction(d, k, ctx)
        assert reduction.m == d + 1
        assert reduction.invariant
        assert reduction.subspace == filtration_F(d + 1, k, ctx)
        assert reduction.m >= previous
        previous = reduction.m


def test_reduction_needs_room(ctx_2_3):
    with pytest.raises(ParameterError):
        sym_reduction(4, 3, ctx_2_3)


def test_equivariance_on_generators(ctx_3_3):
    assert equivariance_check(2, 3, ctx_3_3)
    assert equivariance_check(2, 3, ctx_3_3, elements=[ctx_3_3.identity()])


def test_equivariance_on_random_elements(ctx_3_3):
    rng = np.random.default_rng(1)
    elements = [ctx_3_3.element(*row) for row in ambient_group(ctx_3_3).random_rows(10, rng)]
    assert equivariance_check(1, 3, ctx_3_3, elements=elements)
